"""Build a reduction between two members of the finite-pattern family and check it."""

from wadgelab import constructions as cons
from wadgelab import pointset as ps
from wadgelab.exact import IntervalAtom
from wadgelab.orders import SubsetPattern
from wadgelab.redmap import verify_reduction

a, b = SubsetPattern.parse("{2}"), SubsetPattern.parse("{2,5}")
f = cons.subsetfin_reduction(a, b)
print(f.to_text())

window = IntervalAtom.closed(-1, 9)
rep = verify_reduction(f, ps.Family34(a), ps.Family34(b), window, 400)
print(rep.result_line())
