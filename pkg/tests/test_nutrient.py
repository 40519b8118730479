import math

import numpy as np
import pytest

from tumordyn import (
    ConstantSchedule,
    FourierSchedule,
    PiecewiseLinearSchedule,
    ScheduleError,
    SinusoidSchedule,
    schedule_from_spec,
)


class TestConstant:
    def test_value_and_stats(self):
        s = ConstantSchedule(period=2.0, value=1.5)
        assert s(0.3) == 1.5
        assert s(100.7) == 1.5
        assert s.stats() == (1.5, 1.5, 1.5)

    def test_vectorized(self):
        s = ConstantSchedule(period=1.0, value=2.0)
        out = s(np.array([0.0, 0.5, 3.25]))
        assert out.shape == (3,)
        assert np.all(out == 2.0)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_positivity(self, bad):
        with pytest.raises(ScheduleError):
            ConstantSchedule(period=1.0, value=bad)

    @pytest.mark.parametrize("bad_period", [0.0, -1.0, float("nan")])
    def test_period_validation(self, bad_period):
        with pytest.raises(ScheduleError):
            ConstantSchedule(period=bad_period, value=1.0)


class TestSinusoid:
    def test_values(self):
        s = SinusoidSchedule(period=1.0, mean_level=1.0, amplitude=0.5)
        assert s(0.0) == pytest.approx(1.0)
        assert s(0.25) == pytest.approx(1.5)
        assert s(0.75) == pytest.approx(0.5)

    def test_periodicity_no_phase_drift(self):
        s = SinusoidSchedule(period=1.0, mean_level=1.0, amplitude=0.5)
        assert s(0.1) == pytest.approx(s(1e3 + 0.1), abs=1e-12)

    def test_stats(self):
        s = SinusoidSchedule(period=1.0, mean_level=2.0, amplitude=-0.7)
        assert s.stats() == (2.0, 2.7, 1.3)

    def test_positivity(self):
        with pytest.raises(ScheduleError):
            SinusoidSchedule(period=1.0, mean_level=1.0, amplitude=1.0)


class TestFourier:
    def test_reduces_to_sinusoid(self):
        f = FourierSchedule(period=1.0, mean_level=1.0, sin_coeffs=(0.5,))
        s = SinusoidSchedule(period=1.0, mean_level=1.0, amplitude=0.5)
        tt = np.linspace(0.0, 3.0, 50)
        assert np.allclose(f(tt), s(tt), atol=1e-14)

    def test_mean_is_constant_term(self):
        f = FourierSchedule(
            period=2.0, mean_level=1.3, cos_coeffs=(0.2, -0.1), sin_coeffs=(0.3,)
        )
        assert f.mean == 1.3

    def test_extrema_refined(self):
        f = FourierSchedule(period=1.0, mean_level=1.0, cos_coeffs=(0.4,))
        assert f.maximum == pytest.approx(1.4, abs=1e-10)
        assert f.minimum == pytest.approx(0.6, abs=1e-10)

    def test_positivity(self):
        with pytest.raises(ScheduleError):
            FourierSchedule(period=1.0, mean_level=1.0, cos_coeffs=(1.2,))


class TestPiecewiseLinear:
    def make(self):
        return PiecewiseLinearSchedule(
            period=1.0, knot_times=(0.0, 0.25, 0.75, 1.0), knot_values=(1.0, 2.0, 0.5, 1.0)
        )

    def test_interpolation(self):
        s = self.make()
        assert s(0.125) == pytest.approx(1.5)
        assert s(0.25) == pytest.approx(2.0)
        assert s(1.25) == pytest.approx(2.0)  # wraps

    def test_trapezoid_mean(self):
        s = self.make()
        expected = (
            0.25 * (1.0 + 2.0) / 2 + 0.5 * (2.0 + 0.5) / 2 + 0.25 * (0.5 + 1.0) / 2
        )
        assert s.mean == pytest.approx(expected)
        assert s.maximum == 2.0
        assert s.minimum == 0.5

    def test_must_close(self):
        with pytest.raises(ScheduleError):
            PiecewiseLinearSchedule(
                period=1.0, knot_times=(0.0, 0.5, 1.0), knot_values=(1.0, 2.0, 3.0)
            )

    def test_must_span_period(self):
        with pytest.raises(ScheduleError):
            PiecewiseLinearSchedule(
                period=1.0, knot_times=(0.0, 0.5), knot_values=(1.0, 1.0)
            )
        with pytest.raises(ScheduleError):
            PiecewiseLinearSchedule(
                period=1.0, knot_times=(0.1, 1.0), knot_values=(1.0, 1.0)
            )

    def test_strictly_increasing_times(self):
        with pytest.raises(ScheduleError):
            PiecewiseLinearSchedule(
                period=1.0, knot_times=(0.0, 0.5, 0.5, 1.0), knot_values=(1.0, 2.0, 2.0, 1.0)
            )

    def test_positivity(self):
        with pytest.raises(ScheduleError):
            PiecewiseLinearSchedule(
                period=1.0, knot_times=(0.0, 0.5, 1.0), knot_values=(1.0, -0.5, 1.0)
            )


class TestFromSpec:
    def test_all_forms(self):
        assert isinstance(
            schedule_from_spec({"form": "constant", "period": 1.0, "value": 1.0}),
            ConstantSchedule,
        )
        assert isinstance(
            schedule_from_spec(
                {"form": "sinusoid", "period": 1.0, "mean": 1.0, "amplitude": 0.5}
            ),
            SinusoidSchedule,
        )
        assert isinstance(
            schedule_from_spec({"form": "fourier", "period": 1.0, "mean": 1.0, "sin": [0.3]}),
            FourierSchedule,
        )
        assert isinstance(
            schedule_from_spec(
                {
                    "form": "piecewise",
                    "period": 1.0,
                    "times": [0.0, 0.5, 1.0],
                    "values": [1.0, 2.0, 1.0],
                }
            ),
            PiecewiseLinearSchedule,
        )

    def test_unknown_form(self):
        with pytest.raises(ScheduleError):
            schedule_from_spec({"form": "square"})

    def test_missing_key(self):
        with pytest.raises(ScheduleError):
            schedule_from_spec({"form": "sinusoid", "period": 1.0})

    def test_not_a_mapping(self):
        with pytest.raises(ScheduleError):
            schedule_from_spec("constant")
