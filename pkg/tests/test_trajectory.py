"""Piecewise-polynomial reference: evaluation, continuity, lookup, projection."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P

from corridor_mpcc.trajectory import (
    PolySegment,
    ReferenceTrajectory,
    TrajectoryError,
    trajectory_from_dict,
)

from .oracles import central_gradient


def line_segment(duration=1.0, start=0.0, slope=1.0, corridor_index=0):
    """x = start + slope*s, y = z = 0."""
    coeffs = np.zeros((3, 2))
    coeffs[0] = [start, slope]
    return PolySegment(duration=duration, coeffs=coeffs, corridor_index=corridor_index)


class TestPolySegment:
    def test_hand_values(self):
        seg = PolySegment(
            duration=2.0,
            coeffs=np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]),
            corridor_index=0,
        )
        np.testing.assert_allclose(seg.eval(0.5, 0), [2.75, 0.0, 2.0])
        np.testing.assert_allclose(seg.eval(0.5, 1), [5.0, 0.0, 0.0])
        np.testing.assert_allclose(seg.eval(0.5, 2), [6.0, 0.0, 0.0])

    def test_matches_numpy_polynomial(self):
        rng = np.random.default_rng(7)
        coeffs = rng.normal(size=(3, 6))
        seg = PolySegment(duration=3.0, coeffs=coeffs, corridor_index=0)
        for s in rng.uniform(0.0, 3.0, size=10):
            for order in range(3):
                expected = [P.polyval(s, P.polyder(c, order)) for c in coeffs]
                np.testing.assert_allclose(seg.eval(s, order), expected, atol=1e-12)

    def test_high_order_of_low_degree_is_zero(self):
        seg = line_segment()
        np.testing.assert_allclose(seg.eval(0.5, 3), np.zeros(3))

    def test_rejects_bad_shapes(self):
        with pytest.raises(TrajectoryError, match="3 axes"):
            PolySegment(duration=1.0, coeffs=np.zeros((2, 3)), corridor_index=0)
        with pytest.raises(TrajectoryError, match="duration"):
            PolySegment(duration=0.0, coeffs=np.zeros((3, 2)), corridor_index=0)
        with pytest.raises(TrajectoryError, match="corridor_index"):
            PolySegment(duration=1.0, coeffs=np.zeros((3, 2)), corridor_index=-1)

    @settings(max_examples=20, deadline=None)
    @given(
        coeffs=st.lists(
            st.floats(-3.0, 3.0, allow_nan=False), min_size=2, max_size=6
        ),
        frac=st.floats(0.05, 0.95),
    )
    def test_derivative_matches_finite_differences(self, coeffs, frac):
        c = np.zeros((3, len(coeffs)))
        c[0] = coeffs
        c[1] = coeffs[::-1]
        seg = PolySegment(duration=1.0, coeffs=c, corridor_index=0)
        s = frac * seg.duration
        for ax in range(3):
            fd = central_gradient(
                lambda v, ax=ax: seg.eval(float(v[0]), 0)[ax], np.array([s])
            )[0]
            assert abs(seg.eval(s, 1)[ax] - fd) < 1e-5 * max(1.0, abs(fd))


class TestReferenceTrajectory:
    def two_piece(self, t0=0.0):
        return ReferenceTrajectory(
            segments=(
                line_segment(corridor_index=0),
                line_segment(start=1.0, corridor_index=1),
            ),
            t0=t0,
        )

    def test_span_and_endpoints(self):
        traj = self.two_piece(t0=5.0)
        assert traj.tm == pytest.approx(7.0)
        assert traj.span == pytest.approx(2.0)
        np.testing.assert_allclose(traj.eval(5.0), [0.0, 0.0, 0.0])
        np.testing.assert_allclose(traj.eval(7.0), [2.0, 0.0, 0.0])

    def test_queries_clamp_to_time_span(self):
        traj = self.two_piece()
        np.testing.assert_allclose(traj.eval(-3.0), traj.eval(0.0))
        np.testing.assert_allclose(traj.eval(99.0), traj.eval(2.0))

    def test_derivatives_vanish_past_the_end(self):
        traj = self.two_piece()
        # at exactly tm the segment derivative still applies; past it, zero
        np.testing.assert_allclose(traj.eval(2.0, 1), [1.0, 0.0, 0.0])
        np.testing.assert_allclose(traj.eval(2.1, 1), np.zeros(3))
        np.testing.assert_allclose(traj.eval(2.1, 2), np.zeros(3))

    def test_joint_time_belongs_to_later_segment(self):
        traj = self.two_piece()
        assert traj.corridor_index_at(0.5) == 0
        assert traj.corridor_index_at(1.0) == 1
        assert traj.corridor_index_at(1.5) == 1

    def test_eval_rejects_higher_orders(self):
        with pytest.raises(ValueError, match="order"):
            self.two_piece().eval(0.5, order=3)

    def test_position_discontinuity_rejected_with_pointer(self):
        with pytest.raises(TrajectoryError, match="order 0 at joint 0") as err:
            ReferenceTrajectory(
                segments=(line_segment(), line_segment(start=1.5))
            )
        assert err.value.pointer == "/segments/1"

    def test_velocity_discontinuity_rejected(self):
        with pytest.raises(TrajectoryError, match="order 1 at joint 0"):
            ReferenceTrajectory(
                segments=(line_segment(), line_segment(start=1.0, slope=2.0))
            )

    def test_project_recovers_reference_time(self):
        traj = self.two_piece()
        point = traj.eval(1.3)
        assert traj.project(point, t_guess=1.0, window=1.0) == pytest.approx(
            1.3, abs=1e-6
        )

    def test_project_of_offset_point(self):
        traj = self.two_piece()
        point = traj.eval(1.3) + np.array([0.0, 5.0, 0.0])
        assert traj.project(point, t_guess=1.0, window=1.0) == pytest.approx(
            1.3, abs=1e-6
        )

    def test_project_needs_positive_window(self):
        with pytest.raises(ValueError, match="window"):
            self.two_piece().project(np.zeros(3), t_guess=0.0, window=0.0)


class TestTrajectoryFromDict:
    def good_doc(self):
        return {
            "t0": 0.0,
            "segments": [
                {
                    "duration": 1.0,
                    "coeffs": {"x": [0.0, 1.0], "y": [0.0, 0.0], "z": [0.0, 0.0]},
                    "corridor_index": 0,
                }
            ],
        }

    def test_round_trip(self):
        traj = trajectory_from_dict(self.good_doc())
        np.testing.assert_allclose(traj.eval(0.5), [0.5, 0.0, 0.0])

    def test_missing_segments_pointer(self):
        with pytest.raises(TrajectoryError) as err:
            trajectory_from_dict({})
        assert err.value.pointer == "/segments"

    def test_missing_axis_pointer(self):
        doc = self.good_doc()
        del doc["segments"][0]["coeffs"]["y"]
        with pytest.raises(TrajectoryError, match="malformed coeffs") as err:
            trajectory_from_dict(doc)
        assert err.value.pointer == "/segments/0"

    def test_axis_degree_mismatch(self):
        doc = self.good_doc()
        doc["segments"][0]["coeffs"]["y"] = [0.0]
        with pytest.raises(TrajectoryError, match="disagree") as err:
            trajectory_from_dict(doc)
        assert err.value.pointer == "/segments/0/coeffs"

    def test_bad_duration_pointer(self):
        doc = self.good_doc()
        doc["segments"][0]["duration"] = -1.0
        with pytest.raises(TrajectoryError, match="duration") as err:
            trajectory_from_dict(doc)
        assert err.value.pointer == "/segments/0"
