"""Run a few stages of the reduction of the dyadic rationals to Q and print the invariants."""

from wadgelab import pointset as ps
from wadgelab import stages as st

state = st.reduce_to_Q(ps.Q2(), 5)
for check in (st.check_extension, st.check_coherence, st.check_eps, st.check_sorting, st.check_ledger):
    print(f"{check.__name__:16} {'ok' if check(state) else 'FAILED'}")
print(state.to_text())
