"""Extend a torsor that only lives on the generic fibre.

Y = K[y, z]/(z^2 + z + y/pi) is a Z/2-torsor over the affine line over K with
a rational point above y = 0. Embedding Z/2 in GL_2 with the basis 1, x, the
extension needs one Neron blow-up of the base, after which the torsor becomes a
(Z/2)_R-torsor. Blowing up once more gives a torsor whose special fibre is
trivial.
"""

from torsorext import extend_torsor, is_trivial_special_fiber
from torsorext.catalog import EXAMPLES
from torsorext.document import Document

doc = Document(EXAMPLES["extend-blowup"])
res = extend_torsor(doc.block("X"), doc.scheme_section("X"), doc.block("T"), names=doc.names("T"))
for line in res.lines():
    print(line)
print("generic fibre unchanged:", res.generic_fiber_matches())
print("all torsor checks pass:", res.report.passed)

more = res.further_blowup()
print("after one more blow-up:", more.total)
print("special fibre trivial:", is_trivial_special_fiber(more.torsor, more.group_correspondence()))
