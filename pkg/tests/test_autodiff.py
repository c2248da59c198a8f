import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attnloc import precision
from attnloc.autodiff import (
    Tensor,
    concat,
    concat_coords,
    conv2d,
    coordinate_channels,
    dense,
    grad_check,
    softmax2d,
)
from attnloc.errors import ContractError, ParameterError, ShapeError

from oracles import conv2d_loops, dense_loops, softmax2d_scalar


class TestConv2d:
    def test_identity_kernel(self):
        x = Tensor(np.arange(9, dtype=float).reshape(1, 3, 3))
        k = Tensor(np.ones((1, 1, 1, 1)))
        b = Tensor(np.zeros(1))
        out = conv2d(x, k, b)
        np.testing.assert_array_equal(out.data, x.data)

    def test_constant_input_ones_kernel(self):
        c = 0.7
        x = Tensor(np.full((1, 5, 5), c))
        k = Tensor(np.ones((1, 1, 3, 3)))
        b = Tensor(np.zeros(1))
        out = conv2d(x, k, b, stride=1, padding=0)
        assert out.shape == (1, 3, 3)
        np.testing.assert_allclose(out.data, 9 * c)

    def test_matches_loop_oracle(self, rng):
        x = Tensor(rng.standard_normal((2, 5, 5)))
        k = Tensor(rng.standard_normal((3, 2, 3, 3)))
        b = Tensor(rng.standard_normal(3))
        out = conv2d(x, k, b)
        ref = conv2d_loops(x.data, k.data, b.data)
        np.testing.assert_allclose(out.data, ref, rtol=1e-12, atol=1e-12)

    def test_loop_oracle_random_geometry(self):
        # 50 random shape/stride/padding combos
        rng = np.random.default_rng(7)
        for _ in range(50):
            c_in = int(rng.integers(1, 4))
            c_out = int(rng.integers(1, 4))
            kh, kw = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            stride = int(rng.integers(1, 3))
            padding = int(rng.integers(0, 3))
            h = int(rng.integers(kh, kh + 6))
            w = int(rng.integers(kw, kw + 6))
            x = Tensor(rng.standard_normal((c_in, h, w)))
            k = Tensor(rng.standard_normal((c_out, c_in, kh, kw)))
            b = Tensor(rng.standard_normal(c_out))
            out = conv2d(x, k, b, stride=stride, padding=padding)
            ref = conv2d_loops(x.data, k.data, b.data, stride, padding)
            np.testing.assert_allclose(out.data, ref, rtol=1e-12, atol=1e-12)

    def test_batched_matches_per_sample(self, rng):
        xs = rng.standard_normal((4, 2, 6, 6))
        k = Tensor(rng.standard_normal((3, 2, 3, 3)))
        b = Tensor(rng.standard_normal(3))
        batched = conv2d(Tensor(xs), k, b, stride=2, padding=1)
        for i in range(4):
            single = conv2d(Tensor(xs[i]), k, b, stride=2, padding=1)
            np.testing.assert_allclose(batched.data[i], single.data)

    def test_channel_mismatch_reports_both_shapes(self):
        x = Tensor(np.zeros((2, 4, 4)))
        k = Tensor(np.zeros((1, 3, 3, 3)))
        b = Tensor(np.zeros(1))
        with pytest.raises(ShapeError) as exc:
            conv2d(x, k, b)
        assert "(1, 3, 3, 3)" in str(exc.value)
        assert "(2, 4, 4)" in str(exc.value)


class TestConcatCoords:
    def test_single_pixel_maps_to_axis_start(self):
        out = concat_coords(Tensor(np.zeros((1, 1, 1))))
        assert out.shape == (3, 1, 1)
        assert out.data[1, 0, 0] == -1.0
        assert out.data[2, 0, 0] == -1.0

    def test_height_three_column(self):
        out = concat_coords(Tensor(np.zeros((1, 3, 3))))
        np.testing.assert_allclose(out.data[2, :, 0], [-1.0, 0.0, 1.0])

    def test_formula_evaluation(self):
        # H=5, W=4, pixel (u=2, v=4): x = 2*2/(4-1)-1, y = 2*4/(5-1)-1
        grid = coordinate_channels(5, 4)
        np.testing.assert_allclose(grid[0, 4, 2], 2 * 2 / 3 - 1)
        np.testing.assert_allclose(grid[1, 4, 2], 1.0)

    def test_gradient_skips_coordinate_channels(self):
        x = Tensor(np.random.default_rng(0).standard_normal((2, 3, 3)),
                   requires_grad=True)
        out = concat_coords(x)
        (out * out).sum().backward()
        assert x.grad.shape == (2, 3, 3)
        np.testing.assert_allclose(x.grad, 2 * x.data)


class TestSoftmax2d:
    def test_constant_scores_uniform(self):
        m = softmax2d(Tensor(np.full((3, 5), 2.5)), temperature=0.7)
        np.testing.assert_allclose(m.data, 1.0 / 15.0)

    def test_two_by_two_reference(self):
        s = Tensor(np.array([[0.0, np.log(2.0)], [0.0, 0.0]]))
        m = softmax2d(s, 1.0)
        np.testing.assert_allclose(m.data, [[0.2, 0.4], [0.2, 0.2]],
                                   rtol=1e-12)

    def test_saturation(self):
        scores = np.zeros((4, 4))
        scores[1, 2] = 50.0
        m = softmax2d(Tensor(scores), 1.0)
        assert m.data[1, 2] > 1 - 1e-15

    def test_matches_scalar_reference(self, rng):
        s = rng.standard_normal((4, 6))
        m = softmax2d(Tensor(s), 0.3)
        np.testing.assert_allclose(m.data, softmax2d_scalar(s, 0.3),
                                   rtol=1e-10)

    def test_temperature_must_be_positive(self):
        with pytest.raises(ParameterError):
            softmax2d(Tensor(np.zeros((2, 2))), 0.0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(min_value=-1e4, max_value=1e4),
                    min_size=12, max_size=12),
           st.floats(min_value=1e-2, max_value=10.0))
    def test_normalization_property(self, values, temperature):
        scores = np.array(values).reshape(3, 4)
        m = softmax2d(Tensor(scores), temperature)
        assert np.all(m.data >= 0.0)
        assert np.all(m.data <= 1.0)
        assert abs(m.data.sum() - 1.0) <= 1e-6

    def test_batched_normalizes_each_map(self, rng):
        s = rng.standard_normal((5, 3, 4))
        m = softmax2d(Tensor(s), 0.5)
        np.testing.assert_allclose(m.data.sum(axis=(-2, -1)), np.ones(5),
                                   atol=1e-12)


class TestDense:
    def test_identity(self):
        x = Tensor(np.array([1.0, -2.0, 3.0]))
        out = dense(x, Tensor(np.eye(3)), Tensor(np.zeros(3)))
        np.testing.assert_array_equal(out.data, x.data)

    def test_zero_weights_returns_bias(self):
        x = Tensor(np.ones(4))
        b = np.array([0.5, -1.0])
        out = dense(x, Tensor(np.zeros((2, 4))), Tensor(b))
        np.testing.assert_array_equal(out.data, b)

    def test_matches_loop_oracle(self, rng):
        x = Tensor(rng.standard_normal(4))
        w = Tensor(rng.standard_normal((3, 4)))
        b = Tensor(rng.standard_normal(3))
        ref = dense_loops(x.data, w.data, b.data)
        np.testing.assert_allclose(dense(x, w, b).data, ref, rtol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            dense(Tensor(np.zeros(3)), Tensor(np.zeros((2, 4))),
                  Tensor(np.zeros(2)))

    def test_batched_leading_axes(self, rng):
        x = Tensor(rng.standard_normal((5, 2, 4)))
        w = Tensor(rng.standard_normal((3, 4)))
        b = Tensor(rng.standard_normal(3))
        out = dense(x, w, b)
        assert out.shape == (5, 2, 3)
        ref = dense_loops(x.data[2, 1], w.data, b.data)
        np.testing.assert_allclose(out.data[2, 1], ref, rtol=1e-12)


class TestBackward:
    def test_leaf_passthrough(self):
        x = Tensor(np.array(3.0), requires_grad=True)
        x.backward()
        np.testing.assert_array_equal(x.grad, 1.0)

    def test_sum_of_squares(self, rng):
        x = Tensor(rng.standard_normal(5), requires_grad=True)
        (x * x).sum().backward()
        np.testing.assert_allclose(x.grad, 2 * x.data)

    def test_non_scalar_loss_rejected(self):
        x = Tensor(np.zeros(3), requires_grad=True)
        with pytest.raises(ContractError):
            x.backward()

    def test_shared_node_accumulates_once_per_path(self):
        x = Tensor(np.array(2.0), requires_grad=True)
        y = x * x  # dy/dx = 2x = 4
        z = y + y  # dz/dy = 2
        z.backward()
        np.testing.assert_allclose(x.grad, 8.0)

    def test_forward_deterministic(self, rng):
        x = rng.standard_normal((3, 8, 8))
        k = rng.standard_normal((4, 3, 3, 3))
        b = rng.standard_normal(4)
        one = conv2d(Tensor(x), Tensor(k), Tensor(b), padding=1)
        two = conv2d(Tensor(x), Tensor(k), Tensor(b), padding=1)
        np.testing.assert_array_equal(one.data, two.data)


class TestGradCheck:
    """Every differentiable op, checked against central differences."""

    def test_dense(self, rng):
        x = Tensor(rng.standard_normal(4), requires_grad=True)
        w = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
        b = Tensor(rng.standard_normal(3), requires_grad=True)
        err = grad_check(
            lambda x, w, b: (dense(x, w, b) * dense(x, w, b)).sum(),
            [x, w, b])
        assert err <= 1e-6

    def test_softmax_weighted_sum(self, rng):
        s = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
        v = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
        err = grad_check(
            lambda s, v: (softmax2d(s, 0.5) * v).sum(), [s, v])
        assert err <= 1e-5

    def test_conv_stack(self, rng):
        x = Tensor(rng.standard_normal((2, 6, 6)), requires_grad=True)
        k1 = Tensor(0.5 * rng.standard_normal((3, 2, 3, 3)),
                    requires_grad=True)
        b1 = Tensor(0.1 * rng.standard_normal(3), requires_grad=True)
        k2 = Tensor(0.5 * rng.standard_normal((2, 3, 3, 3)),
                    requires_grad=True)
        b2 = Tensor(0.1 * rng.standard_normal(2), requires_grad=True)
        k3 = Tensor(0.5 * rng.standard_normal((1, 2, 3, 3)),
                    requires_grad=True)
        b3 = Tensor(0.1 * rng.standard_normal(1), requires_grad=True)

        def fn(x, k1, b1, k2, b2, k3, b3):
            h = conv2d(x, k1, b1, padding=1).relu()
            h = conv2d(h, k2, b2, padding=1).relu()
            return conv2d(h, k3, b3, padding=1).mean()

        err = grad_check(fn, [x, k1, b1, k2, b2, k3, b3])
        assert err <= 1e-4

    @pytest.mark.parametrize("seed", range(10))
    def test_all_ops_across_seeds(self, seed):
        rng = np.random.default_rng(seed)
        x = Tensor(rng.standard_normal((2, 4, 4)), requires_grad=True)
        y = Tensor(rng.standard_normal((2, 4, 4)), requires_grad=True)
        k = Tensor(rng.standard_normal((2, 2, 3, 3)), requires_grad=True)
        b = Tensor(rng.standard_normal(2), requires_grad=True)
        w = Tensor(rng.standard_normal((3, 8)), requires_grad=True)
        wb = Tensor(rng.standard_normal(3), requires_grad=True)

        cases = {
            "add": lambda: ((x + y) * (x + y)).sum(),
            "mul": lambda: (x * y).sum(),
            "relu": lambda: (x.relu() * y).sum(),
            "tanh": lambda: (x.tanh() * y).sum(),
            "sum_axes": lambda: (x.sum(axis=(-2, -1)) * 2.0).sum(),
            "mean": lambda: x.mean(),
            "reshape": lambda: (x.reshape(2, 16) * x.reshape(2, 16)).sum(),
            "concat": lambda: (concat([x, y], axis=0)
                               * concat([y, x], axis=0)).sum(),
            "concat_coords": lambda: (concat_coords(x)
                                      * concat_coords(y)).sum(),
            "conv2d": lambda: (conv2d(x, k, b, padding=1)
                               * conv2d(x, k, b, padding=1)).mean(),
            "softmax2d": lambda: (softmax2d(x, 0.7) * y).sum(),
            "dense": lambda: (dense(x.reshape(4, 8), w, wb)
                              * dense(y.reshape(4, 8), w, wb)).sum(),
        }
        for name, fn in cases.items():
            err = grad_check(lambda *args, fn=fn: fn(),
                             [x, y, k, b, w, wb])
            assert err <= 1e-4, f"{name} failed grad check: {err}"


class TestPrecisionModes:
    def test_f32_mode_produces_f32(self):
        with precision("f32"):
            t = Tensor(np.zeros(3))
            assert t.data.dtype == np.float32
            out = conv2d(Tensor(np.zeros((1, 4, 4))),
                         Tensor(np.zeros((1, 1, 3, 3))),
                         Tensor(np.zeros(1)))
            assert out.data.dtype == np.float32

    def test_f64_is_default_here(self):
        assert Tensor(np.zeros(1)).data.dtype == np.float64
