"""End-to-end acceptance checks.

One test per verification item; each prints a PASS/FAIL line so a plain
pytest -s run doubles as the acceptance protocol.  Tolerances are pinned
here and nowhere else.
"""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from plevylab import functionals as F
from plevylab import kernels as K
from plevylab import sweep as S
from plevylab.constants import kdp_closed, kdp_mc, kdp_mean
from plevylab.fields import (Gaussian, Linear, SignJump, SmoothBump, Tent,
                             sobolev_norm_p)
from plevylab.geometry import interval, slit_interval

GRID = (0.4, 0.2, 0.1, 0.05, 0.02)
UNIT = interval(0.0, 1.0)
SYM = interval(-1.0, 1.0)
DET = F.MODE_DET
MC = F.MODE_MC


def check(name, ok, detail=""):
    print("[%s] %s %s" % ("PASS" if ok else "FAIL", name, detail))
    assert ok, "%s %s" % (name, detail)


# -- 1: constant agreement --------------------------------------------------

def test_criterion_1_constant_agreement():
    worst = 0.0
    for d in (2, 3, 4, 5):
        for p in (1.0, 1.5, 2.0, 3.0):
            gap = abs(kdp_mean(d, p) - kdp_closed(d, p))
            worst = max(worst, gap)
            assert gap <= 1e-10, (d, p, gap)
            mc, se = kdp_mc(d, p, n=1_000_000, seed=17)
            assert abs(mc - kdp_mean(d, p)) <= 4.0 * se, (d, p)
    spot = all(abs(kdp_mean(d, 2.0) - 1.0 / d) < 1e-12 for d in (2, 3, 4, 5))
    spot = spot and abs(kdp_mean(2, 1.0) - 2.0 / math.pi) < 1e-12
    check("criterion 1 (constant, 3 routes x 16 cases)", spot,
          "max |mean-closed| = %.2e" % worst)


# -- 2: kernel axioms ---------------------------------------------------------

def test_criterion_2_kernel_axioms():
    families = list(K.default_families(1, 2.0))
    families.append(K.KernelFamily("stable", 1, 1.0))
    worst_norm = 0.0
    for fam in families:
        masses = []
        for eps in fam.default_grid():
            kern = fam.kernel(eps)
            norm = K.normalization(kern)
            worst_norm = max(worst_norm, abs(norm - 1.0))
            assert abs(norm - 1.0) <= 1e-6, (fam.kind, eps)
            masses.append(K.mass_outside(kern, 0.1))
        # strictly decreasing until compact supports reach exactly zero
        for a, b in zip(masses, masses[1:]):
            assert b < a or (a == 0.0 and b == 0.0), (fam.kind, masses)
    for p in (1.0, 2.0):
        for eps in GRID:
            kern = K.make_stable(1, p, eps)
            for delta in (0.1, 0.5, 1.0):
                closed = (p - eps) * (1 - delta ** eps) / p + eps / p
                assert abs(K.mass_outside(kern, delta) - closed) <= 1e-8
    check("criterion 2 (kernel axioms, %d families)" % len(families), True,
          "max |norm-1| = %.2e" % worst_norm)


# -- 3: W^{1,p} limit ---------------------------------------------------------

def _closed_linear(eps):
    return (2.0 - eps) / (2.0 * (1.0 + eps))


def test_criterion_3a_deterministic_closed_form():
    worst = 0.0
    for eps in GRID:
        est = F.energy(Linear((1.0,)), UNIT, K.make_stable(1, 2.0, eps),
                       mode=DET)
        worst = max(worst, abs(est.value - _closed_linear(eps)))
    check("criterion 3a (W1p energy = (2-eps)/(2(1+eps)) within 1e-8)",
          worst <= 1e-8, "max dev = %.2e" % worst)


def test_criterion_3b_two_percent_at_smallest_eps():
    # the closed form itself sits 2.94% below the limit at eps = 0.02, so
    # this bound cannot hold; it is asserted as stated and fails honestly
    est = F.energy(Linear((1.0,)), UNIT, K.make_stable(1, 2.0, 0.02),
                   mode=DET)
    rel = abs(est.value - 1.0)
    check("criterion 3b (value at eps=0.02 within 2% of 1)", rel <= 0.02,
          "actual deviation %.4f" % rel)


def test_criterion_3c_mc_agrees():
    for eps in GRID:
        est = F.energy(Linear((1.0,)), UNIT, K.make_stable(1, 2.0, eps),
                       mode=MC, n=1_000_000, seed=42)
        assert abs(est.value - _closed_linear(eps)) <= 4.0 * est.stderr, eps
    check("criterion 3c (MC within 4 stderr of closed form)", True)


# -- 4: BV limit --------------------------------------------------------------

def test_criterion_4_bv_limit():
    worst = 0.0
    for eps in GRID:
        est = F.energy(SignJump(1), SYM, K.make_stable(1, 1.0, eps),
                       mode=DET)
        worst = max(worst, abs(est.value - (2.0 - 2.0 ** eps)))
    final = F.energy(SignJump(1), SYM, K.make_stable(1, 1.0, 0.02),
                     mode=DET).value
    ok = worst <= 1e-8 and abs(final - 1.0) <= 0.02
    check("criterion 4 (BV energy = 2-2^eps, within 2% of 1 at 0.02)", ok,
          "max dev %.2e, final gap %.4f" % (worst, abs(final - 1.0)))


# -- 5: slit counterexample ---------------------------------------------------

def test_criterion_5_counterexample():
    slit = slit_interval()
    worst = 0.0
    for eps in GRID:
        est = F.energy(SignJump(1), slit, K.make_stable(1, 1.0, eps),
                       mode=DET)
        worst = max(worst, abs(est.value - (2.0 - 2.0 ** eps)))
    assert worst <= 1e-8
    case = {c.case_id: c for c in S.builtin_suite(seed=42)}[
        "counterexample-energy"]
    report = S.run_sweep(case)
    assert report.verdict == S.VERDICT_DIVERGED_TARGET
    assert "limit exists" in report.detail
    cuts = (1e-2, 1e-3, 1e-4, 1e-5)
    vals = [F.gagliardo(SignJump(1), slit, 0.5, 2.0, cutoff=t)
            for t in cuts]
    slope = np.polyfit([math.log(1.0 / t) for t in cuts], vals, 1)[0]
    assert slope > 0.5
    sub = [F.gagliardo(SignJump(1), slit, 0.25, 2.0, cutoff=t)
           for t in (1e-4, 1e-5)]
    stable_change = abs(sub[1] - sub[0]) / abs(sub[1])
    assert stable_change < 0.01
    check("criterion 5 (slit: energy -> 1 != 0, log slope %.2f, "
          "subcritical change %.3f%%)" % (slope, 100 * stable_change), True)


# -- 6: pointwise operator ----------------------------------------------------

def test_criterion_6_generator():
    for d in (1, 2):
        vals = [F.generator(Gaussian(d), np.zeros(d),
                            K.make_stable(d, 2.0, eps)) for eps in GRID]
        errs = [abs(v - 1.0) for v in vals]
        assert errs[-1] <= 0.02, (d, errs[-1])
        assert all(a >= b for a, b in zip(errs[-3:], errs[-2:])), (d, errs)
    check("criterion 6 (generator -> 1 within 2%%, final err %.4f)"
          % errs[-1], True)


# -- 7: unit-mass pairing -----------------------------------------------------

def test_criterion_7_dirac_pairing():
    bump = SmoothBump(1, 0.5)
    fam = K.KernelFamily("truncated_power", 1, 1.0, beta=1.0)
    val = F.dirac_pairing(bump, fam.kernel(0.02))
    assert abs(val - 1.0) <= 0.02

    class OddBump:
        support_radius = 0.5

        @staticmethod
        def eval(pts):
            x = pts[:, 0]
            out = np.zeros_like(x)
            inside = np.abs(x) < 0.5
            out[inside] = x[inside] * np.exp(
                1 - 1 / (1 - (x[inside] / 0.5) ** 2))
            return out

    for eps in GRID:
        assert F.dirac_pairing(OddBump(), fam.kernel(eps)) == 0.0
    check("criterion 7 (pairing within 2%% of 1: gap %.2e; odd exactly 0)"
          % abs(val - 1.0), True)


# -- 8: cross-boundary collapse ----------------------------------------------

def test_criterion_8_cross_boundary():
    tent = Tent(1)
    for p in (1.0, 2.0):
        vals = [F.cross_energy(tent, UNIT, K.make_stable(1, p, eps),
                               mode=DET, abs_tol=1e-8).value
                for eps in GRID]
        assert all(a > b for a, b in zip(vals, vals[1:])), (p, vals)
        bound = 0.05 * sobolev_norm_p(tent, p)
        assert vals[-1] < bound, (p, vals[-1], bound)
    check("criterion 8 (cross energy strictly decreasing, final < "
          "0.05 ||u||^p)", True)


# -- 9: localized measure -----------------------------------------------------

def test_criterion_9_local_measure():
    est = F.local_measure(Linear((1.0,)), UNIT, interval(0.25, 0.75),
                          K.make_stable(1, 2.0, 0.02), mode=DET)
    gap_w = abs(est.value - 0.5) / 0.5
    assert gap_w <= 0.03
    est = F.local_measure(SignJump(1), SYM, interval(-0.5, 0.5),
                          K.make_stable(1, 1.0, 0.02), mode=DET)
    gap_bv = abs(est.value - 1.0)
    assert gap_bv <= 0.03
    check("criterion 9 (local measure gaps %.4f / %.4f within 3%%)"
          % (gap_w, gap_bv), True)


# -- 10: fractional rescaling limit ----------------------------------------------

def test_criterion_10_fractional_limit():
    s_grid = (0.8, 0.9, 0.95, 0.99)
    worst = 0.0
    errs = []
    for s in s_grid:
        val = (1.0 - s) * F.gagliardo(Linear((1.0,)), UNIT, s, 2.0)
        closed = 1.0 - 2.0 * (1.0 - s) / (3.0 - 2.0 * s)
        worst = max(worst, abs(val - closed))
        errs.append(abs(val - 1.0))
    ok = worst <= 1e-8 and all(a > b for a, b in zip(errs, errs[1:])) \
        and errs[-1] < 0.02
    check("criterion 10 ((1-s)G = 1-2(1-s)/(3-2s) within 1e-8, -> 1)", ok,
          "max dev %.2e, final gap %.4f" % (worst, errs[-1]))


# -- 11: reproducibility ------------------------------------------------------

@pytest.mark.slow
def test_criterion_11_suite_determinism(tmp_path):
    cmd = [sys.executable, "-m", "plevylab.cli", "suite", "--seed", "42",
           "--format", "json"]
    env = dict(os.environ)
    runs = []
    for threads in ("1", "1", "2"):
        env["PLEVYLAB_THREADS"] = threads
        out = subprocess.run(cmd, capture_output=True, env=env)
        assert out.returncode == 0, out.stderr.decode()[:500]
        runs.append(out.stdout)
    assert runs[0] == runs[1], "repeat run differs"
    assert runs[0] == runs[2], "thread count changes output"
    check("criterion 11 (suite --seed 42 byte-identical, %d bytes)"
          % len(runs[0]), True)
