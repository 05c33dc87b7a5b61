import math

import numpy as np
import pytest

from plevylab.fields import (BallIndicator, FieldError, Gaussian,
                             InterfaceGradientError, Linear, SignJump,
                             SmoothBump, Tent, bv_seminorm, grad_lp_norm,
                             sobolev_norm_p)
from plevylab.geometry import Ball, interval, slit_interval


def test_linear_eval_and_grad():
    u = Linear((2.0, -1.0), 0.5)
    pts = np.array([[1.0, 1.0], [0.0, 3.0]])
    assert np.allclose(u.eval(pts), [1.5, -2.5])
    assert np.allclose(u.grad(pts), [[2.0, -1.0], [2.0, -1.0]])


def test_gaussian_grad_at_origin():
    g = Gaussian(2)
    assert np.allclose(g.grad([[0.0, 0.0]]), 0.0)
    assert abs(float(g.laplacian([[0.0, 0.0]])[0]) + 4.0) < 1e-14


def test_sign_jump_values():
    sj = SignJump(1)
    assert float(sj.eval([[-0.5]])[0]) == -0.5
    assert float(sj.eval([[0.75]])[0]) == 0.5
    assert np.allclose(sj.grad([[0.3]]), 0.0)
    with pytest.raises(InterfaceGradientError):
        sj.grad([[0.0]])


def test_bump_is_smooth_and_compact():
    b = SmoothBump(1, 0.5)
    assert float(b.eval([[0.0]])[0]) == 1.0
    assert float(b.eval([[0.6]])[0]) == 0.0
    # gradient consistent with finite differences inside the support
    x = 0.2
    h = 1e-6
    fd = (float(b.eval([[x + h]])[0]) - float(b.eval([[x - h]])[0])) / (2 * h)
    assert abs(float(b.grad([[x]])[0, 0]) - fd) < 1e-6


def test_grad_lp_norm_linear():
    assert abs(grad_lp_norm(Linear((1.0,)), interval(0, 1), 2.0) - 1.0) \
        < 1e-14


def test_grad_lp_norm_tent():
    assert abs(grad_lp_norm(Tent(1), interval(-1, 1), 1.0) - 2.0) < 1e-10


def test_grad_lp_norm_gaussian_ball_polar_oracle():
    # closed-form polar integral of |2r exp(-r^2)|^2 over the radius-3 disk
    val = grad_lp_norm(Gaussian(2), Ball(3.0, 2), 2.0)
    oracle = math.pi * (1.0 - 19.0 * math.exp(-18.0))
    assert abs(val - oracle) < 1e-8


def test_grad_lp_norm_monotone_in_domain():
    g = Gaussian(1)
    small = grad_lp_norm(g, interval(-0.5, 0.5), 2.0)
    large = grad_lp_norm(g, interval(-1.0, 1.0), 2.0)
    assert small <= large


def test_lipschitz_bound():
    # |grad u| <= 1 for the tent, so the p-energy is at most the volume
    dom = interval(-1, 1)
    for p in (1.0, 2.0, 3.0):
        assert grad_lp_norm(Tent(1), dom, p) <= dom.volume() + 1e-12


def test_grad_lp_norm_piecewise():
    # no interface inside the slit domain: the field is W^{1,p} with zero
    # gradient there; inside (-1,1) the jump forbids a gradient norm
    assert grad_lp_norm(SignJump(1), slit_interval(), 2.0) == 0.0
    with pytest.raises(FieldError):
        grad_lp_norm(SignJump(1), interval(-1, 1), 2.0)


def test_bv_seminorm_sign_jump():
    assert bv_seminorm(SignJump(1), interval(-1, 1)) == 1.0
    assert bv_seminorm(SignJump(1), slit_interval()) == 0.0


def test_bv_seminorm_ball_indicator_perimeter():
    val = bv_seminorm(BallIndicator(2, 0.5), Ball(1.0, 2))
    assert abs(val - math.pi) < 1e-14
    # interface outside the domain contributes nothing
    assert bv_seminorm(BallIndicator(2, 1.5), Ball(1.0, 2)) == 0.0


def test_bv_seminorm_homogeneous():
    sj = SignJump(1)
    for c in (-3.0, 0.5, 2.0):
        assert bv_seminorm(sj.scaled(c), interval(-1, 1)) == abs(c)


def test_bv_rejects_smooth_fields():
    with pytest.raises(FieldError):
        bv_seminorm(Gaussian(1), interval(-1, 1))


def test_sobolev_norm_tent():
    # int |u|^p = 2/(p+1), int |u'|^p = 2 on the real line
    for p in (1.0, 2.0):
        assert abs(sobolev_norm_p(Tent(1), p) - (2.0 / (p + 1) + 2.0)) \
            < 1e-9


def test_shift_keeps_gradient():
    u = Linear((1.0,)).shifted(5.0)
    assert float(u.eval([[0.25]])[0]) == 5.25
    assert abs(grad_lp_norm(u, interval(0, 1), 2.0) - 1.0) < 1e-14
