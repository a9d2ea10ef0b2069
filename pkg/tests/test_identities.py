"""Every named circuit identity must hold on the dense oracle at 1e-10."""

import pytest

from c4distill.identities import IDENTITIES, TOL, verify_all


@pytest.mark.parametrize("name", sorted(IDENTITIES))
def test_identity(name):
    _, fn = IDENTITIES[name]
    dist = fn()
    assert dist <= TOL, f"{name} deviates by {dist:.3e}"


def test_groups_cover_the_construction():
    groups = {g for g, _ in IDENTITIES.values()}
    assert groups == {"gadget", "measurement", "errors", "appendix"}
    appendix = [n for n, (g, _) in IDENTITIES.items() if g == "appendix"]
    assert len(appendix) == 5


def test_verify_all_shape():
    results = verify_all()
    assert set(results) == set(IDENTITIES)
    assert all(ok for ok, _ in results.values())
