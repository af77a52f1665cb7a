import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vempz.errors import InvalidInput
from vempz.linalg import fir_apply
from vempz.synthesis import (
    NASAL_N,
    LfParams,
    ResonatorSpec,
    SynthSpec,
    build_resonator,
    lf_pulse,
    solve_lf,
    synth_frame,
)


class TestLfPulse:
    def test_starts_at_zero(self):
        assert lf_pulse(LfParams(), 200, 8000)[0] == 0.0

    @pytest.mark.parametrize("f0", [200, 250, 300, 350, 400])
    def test_continuity_at_te(self, f0):
        shape = solve_lf(LfParams(), round(8000 / f0))
        left = shape.open_phase(shape.t_e)
        right = shape.return_phase(shape.t_e)
        assert left == pytest.approx(-1.0, abs=1e-9)
        assert right == pytest.approx(-1.0, abs=1e-9)

    @pytest.mark.parametrize("f0", [100, 200, 250, 300, 350, 400])
    def test_zero_net_area(self, f0):
        pulse = lf_pulse(LfParams(), f0, 8000)
        assert abs(pulse.sum()) < 1e-6 * pulse.size
        assert abs(pulse.sum()) < 1e-9

    def test_negative_peak(self):
        pulse = lf_pulse(LfParams(ee=2.5), 200, 8000)
        assert pulse.min() == pytest.approx(-2.5, rel=0.05)

    def test_bad_timing(self):
        with pytest.raises(InvalidInput):
            LfParams(tp=0.6, te=0.5)

    def test_period_too_short(self):
        with pytest.raises(InvalidInput):
            lf_pulse(LfParams(), 1500, 8000)


class TestResonator:
    def test_nasal(self):
        model = build_resonator(NASAL_N)
        assert model.k == 4 and model.l == 2
        radii = np.sort(np.abs(model.poles()))
        assert radii[-1] == pytest.approx(np.exp(-np.pi * 32 / 8000), abs=1e-12)
        assert radii[-1] == pytest.approx(0.987512, abs=1e-6)
        freqs = np.sort(np.abs(np.angle(model.zeros()))) * 8000 / (2 * np.pi)
        np.testing.assert_allclose(freqs, [1223, 1223])

    def test_quarter_rate_angle(self):
        model = build_resonator(ResonatorSpec(formants=((2000.0, 50.0),), sample_rate=8000.0))
        np.testing.assert_allclose(np.abs(np.angle(model.poles())), np.pi / 2, atol=1e-12)

    def test_all_pole(self):
        model = build_resonator(ResonatorSpec(formants=((500.0, 60.0),)))
        assert model.l == 0

    def test_nyquist(self):
        with pytest.raises(InvalidInput):
            ResonatorSpec(formants=((4000.0, 50.0),), sample_rate=8000.0)


class TestSynthFrame:
    def test_no_noise(self):
        sf = synth_frame(SynthSpec(ratio_db=np.inf))
        assert not sf.m_true.any()

    def test_exact_ratio(self):
        sf = synth_frame(SynthSpec(ratio_db=30.0, seed=3))
        ratio = 10 * np.log10(np.sum(sf.e_true**2) / np.sum(sf.m_true**2))
        assert ratio == pytest.approx(30.0, abs=1e-6)

    def test_identity_resonator(self):
        sf = synth_frame(SynthSpec(resonator=ResonatorSpec(), seed=1))
        np.testing.assert_allclose(sf.y, sf.e_true + sf.m_true, atol=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([200.0, 250.0, 300.0, 350.0, 400.0]))
    def test_model_consistency(self, seed, f0):
        sf = synth_frame(SynthSpec(f0=f0, seed=seed))
        a, b = sf.model_true.denominator, sf.model_true.numerator
        m = fir_apply(a, sf.y) - fir_apply(b, sf.e_true)
        np.testing.assert_allclose(m, sf.m_true, atol=1e-10)

    def test_determinism(self):
        a, b = synth_frame(SynthSpec(seed=9)), synth_frame(SynthSpec(seed=9))
        assert a.y.tobytes() == b.y.tobytes()
        c = synth_frame(SynthSpec(seed=10))
        assert not np.array_equal(a.m_true, c.m_true)

    @pytest.mark.parametrize("f0", [200.0, 300.0, 350.0])
    def test_periodic_support(self, f0):
        sf = synth_frame(SynthSpec(f0=f0, seed=4))
        period = round(8000 / f0)
        e = sf.e_true
        start = sf.onset
        np.testing.assert_array_equal(e[:start], 0.0)
        for s in range(start + period, 240 - period, period):
            np.testing.assert_array_equal(e[s : s + period], e[start : start + period])

    def test_f0_range(self):
        with pytest.raises(InvalidInput):
            SynthSpec(f0=2500.0)
