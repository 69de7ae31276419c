"""Free-space path loss and link-budget identities.

The numeric references below were computed independently with 50-digit
decimal arithmetic (mpmath) and frozen here as literals.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ris_sic.budget import fspl_db, leaked_power_dbm, received_power_dbm, residual_si_dbm
from ris_sic.model import LinkBudget

# 20*log10(4*pi*d*f/c0) at d = 1 m, f = 5.385 GHz
FSPL_1M_REF = 47.071497374563381606
# same with 3 dBi on both ends
FSPL_1M_GAINS_REF = 41.071497374563381606
# 20*log10(2): doubling the distance
DOUBLING_REF = 6.0205999132796239043


def test_fspl_reference_point():
    assert fspl_db(1.0, 5.385e9) == pytest.approx(FSPL_1M_REF, abs=1e-9)


def test_fspl_gains_subtract():
    assert fspl_db(1.0, 5.385e9, 3.0, 3.0) == pytest.approx(FSPL_1M_GAINS_REF, abs=1e-9)
    # gain handling is exact subtraction, no hidden conversion
    assert fspl_db(1.0, 5.385e9, 3.0, 3.0) == fspl_db(1.0, 5.385e9) - 6.0


def test_fspl_distance_doubling():
    delta = fspl_db(2.0, 5.385e9) - fspl_db(1.0, 5.385e9)
    assert delta == pytest.approx(DOUBLING_REF, abs=1e-9)


def test_fspl_frequency_doubling():
    delta = fspl_db(1.0, 2 * 5.385e9) - fspl_db(1.0, 5.385e9)
    assert delta == pytest.approx(DOUBLING_REF, abs=1e-9)


def test_fspl_rejects_nonpositive():
    with pytest.raises(ValueError):
        fspl_db(0.0, 5.385e9)
    with pytest.raises(ValueError):
        fspl_db(1.0, 0.0)
    with pytest.raises(ValueError):
        fspl_db(-1.0, 5.385e9)


@given(
    st.floats(min_value=0.01, max_value=1e4),
    st.floats(min_value=1e6, max_value=1e11),
)
def test_fspl_matches_closed_form(d, f):
    expected = 20 * np.log10(4 * np.pi * d * f / 299_792_458.0)
    assert fspl_db(d, f) == pytest.approx(expected, rel=1e-12)


def test_leaked_power_identity():
    # P_tx - alpha_iso, exact float subtraction
    assert leaked_power_dbm(10.0, 44.0) == -34.0
    assert leaked_power_dbm(23.0, 110.0) == -87.0


def test_received_power_is_tx_minus_fspl():
    got = received_power_dbm(10.0, 2.0, 5.385e9, 3.0, 3.0)
    assert got == 10.0 - fspl_db(2.0, 5.385e9, 3.0, 3.0)


def test_residual_chain():
    # 30 dB of surface-side cancellation below a -34 dBm leak leaves -64 dBm
    assert residual_si_dbm(10.0, 44.0, 30.0) == -64.0
    # with none it reduces to the plain leakage budget
    assert residual_si_dbm(10.0, 44.0, 0.0) == leaked_power_dbm(10.0, 44.0)


@given(
    st.floats(min_value=-30.0, max_value=30.0),
    st.floats(min_value=20.0, max_value=140.0),
    st.floats(min_value=0.0, max_value=80.0),
)
def test_power_identities_fuzz(p_tx, alpha, p_ris):
    assert leaked_power_dbm(p_tx, alpha) == p_tx - alpha
    assert residual_si_dbm(p_tx, alpha, p_ris) == p_tx - alpha - p_ris


def test_link_budget_bundle_delegates():
    lb = LinkBudget(p_tx_dbm=10.0, alpha_iso_db=44.0, p_ris_db=25.0, d_m=2.0, f_hz=5.385e9)
    assert lb.leaked_power_dbm() == -34.0
    assert lb.residual_si_dbm() == -59.0
    assert lb.received_power_dbm() == received_power_dbm(10.0, 2.0, 5.385e9, 0.0, 0.0)


def test_link_budget_rejects_bad_geometry():
    with pytest.raises(ValueError):
        LinkBudget(p_tx_dbm=10.0, alpha_iso_db=44.0, d_m=0.0)
    with pytest.raises(ValueError):
        LinkBudget(p_tx_dbm=10.0, alpha_iso_db=44.0, f_hz=-1.0)
