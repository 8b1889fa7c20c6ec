"""Built-in manifests accepted by name on the command line."""
from __future__ import annotations

from .manifest import Manifest, load_manifest

EXAMPLE3 = """\
[manifold]
name = example3
dimension = 3
coordinates = x, y, z

[frame]
nu1 = 0, exp(z), 0
nu2 = exp(z), exp(z), 0
nu3 = 0, 0, 1

[metric]
1, 0, 0
0, 1, 0
0, 0, -1

[structure]
phi = -1, 0, 0
phi = 0, -1, 0
phi = 0, 0, 0
xi = 0, 0, 1
closed_eta = true

[domain]
x = -1, 1
y = -1, 1
z = -1, 1
"""

# the invariant leaf x = 0 spanned by nu1 and nu3: D is the whole tangent space
EXAMPLE3_LEAF = EXAMPLE3.replace("name = example3", "name = example3-leaf") + """
[submanifold]
coordinates = u, v
map = 0, u, v
tangent_frame = 1, 0, 0
tangent_frame = 0, 0, 1
D = 0, 1
D_perp =
orientation = xi_horizontal

[submanifold.domain]
u = -1, 1
v = -1, 1
"""

BUILTINS = {"example3": EXAMPLE3, "example3-leaf": EXAMPLE3_LEAF}


def builtin_manifest(name: str) -> Manifest:
    return load_manifest(BUILTINS[name])
