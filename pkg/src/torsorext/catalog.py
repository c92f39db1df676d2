"""Built-in example problems, keyed by the ids accepted by ``torsorext examples``."""

EXTEND_DIRECT = """torsor-problem v1
[problem]
p = 2
command = extend
target = T

[scheme X]
base = R
variables = y
relations =
flat = true
section = y=0

[group G]
builtin = Z/p
base = K
var = x

[torsor T]
base = X
group = G
over = K
fibre = z
relations = z^2 - z - y
coaction.z = x_L + z_R
point = y=0, z=0
"""

ITERATE = """torsor-problem v1
[problem]
p = 2
command = blowup
target = T
times = 2

[scheme X]
base = R
variables = y
relations =
flat = true

[group G]
builtin = Z/p
base = R
var = x

[torsor T]
base = X
group = G
over = R
fibre = z
relations = z^2 - z - pi^2*y
coaction.z = x_L + z_R
embedding = additive
blowup-section = z=0
"""

EXTEND_SCALED = """torsor-problem v1
[problem]
p = 2
command = extend
target = T

[scheme X]
base = R
variables = y
relations =
flat = true
section = y=0

[group G]
builtin = Z/p
base = K
var = x

[torsor T]
base = X
group = G
over = K
fibre = z
relations = z^2 + z + pi^-1*y
coaction.z = x_L + z_R
point = y=0, z=0
embedding = basis: 1, pi*x
"""

GUARD_STOP = """torsor-problem v1
[problem]
p = 2
command = blowup
target = T
times = 1

[scheme X]
base = R
variables = y
relations =
flat = true

[group G]
builtin = alpha
alpha = 1
var = x12

[torsor T]
base = X
group = G
over = R
fibre = z12
relations = z12^2 + pi*z12 + pi*y
coaction.z12 = x12_L + z12_R
embedding = additive
blowup-section = z12=0
"""

EXTEND_BLOWUP = """torsor-problem v1
[problem]
p = 2
command = extend
target = T

[scheme X]
base = R
variables = y
relations =
flat = true
section = y=0

[group G]
builtin = Z/p
base = K
var = x

[torsor T]
base = X
group = G
over = K
fibre = z
relations = z^2 + z + pi^-1*y
coaction.z = x_L + z_R
point = y=0, z=0
embedding = basis: 1, x
names = y->t
"""

M_GROUP = """torsor-problem v1
[problem]
p = 2
command = blowup
target = T
times = 1

[scheme X]
base = R
variables = x
relations =
flat = true

[group G]
builtin = Z/p
base = R
var = g

[torsor T]
base = X
group = G
over = R
fibre = y
relations = y^2 - y - pi*x
coaction.y = g_L + y_R
embedding = additive
blowup-section = y=0
"""

M_TORSOR = """torsor-problem v1
[problem]
p = 3
command = blowup
target = T
times = 1

[scheme X]
base = R
variables = x
relations =
flat = true

[group G]
builtin = Z/p
base = R
var = g

[torsor T]
base = X
group = G
over = R
fibre = y
relations = y^3 - y + pi*(x^2 + pi*x)
coaction.y = g_L + y_R
embedding = additive
blowup-section = y=0
"""

EXAMPLES = {
    "extend-direct": EXTEND_DIRECT,
    "iterate": ITERATE,
    "extend-scaled": EXTEND_SCALED,
    "guard-stop": GUARD_STOP,
    "extend-blowup": EXTEND_BLOWUP,
    "m-group": M_GROUP,
    "m-torsor": M_TORSOR,
}
