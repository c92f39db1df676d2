"""Blow up an Artin-Schreier torsor repeatedly until the finiteness guard stops us.

Start from z^2 - z - pi^3*y over R[y] under the constant group Z/2. Each
Neron blow-up at z = 0 rescales z by pi and the group by the same factor, so
the model degenerates toward the quasi-finite groups pi^k*x^2 - x. After three
steps the special fibre is no longer finite over the base.
"""

from torsorext import FinitenessGuardFailed, blowup_torsor, verify_torsor
from torsorext.catalog import EXAMPLES
from torsorext.document import Document

text = EXAMPLES["iterate"].replace("pi^2*y", "pi^3*y")
T = Document(text).block("T")
print("start:", T.total)

step = 0
while True:
    try:
        T = blowup_torsor(T, {"z": 0})
    except FinitenessGuardFailed as exc:
        print(f"step {step + 1}: refused, special fibre {exc.fiber} is not finite over the base")
        break
    step += 1
    ok = verify_torsor(T).passed
    print(f"step {step}: total {T.total}, group {T.group.algebra}, torsor axioms {'hold' if ok else 'FAIL'}")
