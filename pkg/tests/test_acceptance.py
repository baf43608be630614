"""Acceptance suite: one test per criierion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
complete.  The end-to-end ensemble criterion takes a couple of minutes.
"""

import math
import time

import numpy as np
import pytest

from spdclink.analysis import (
    FringeTrace,
    expected_period_bins,
    find_extrema,
    linear_visibility_extrapolation,
    monte_carlo_visibility,
    shot_noise_visibility_error,
    visibility,
)
from spdclink.coherence import SourceSpectrum, coherence_length, coherence_time
from spdclink.coincidence import accidental_estimate, bin_counts, count_coincidences
from spdclink.pipeline import ensemble_visibilities, run_analyze, run_audit, run_simulate
from spdclink.quantum import emission_probability, fringe_visibility_from_amplitudes
from spdclink.rates import brightness
from spdclink.scenario import load_scenario
from spdclink.tagsim import TimeTagStream, simulate_scan

from conftest import brute_greedy_count, random_tag_instance


def check(num, description, condition, detail=""):
    status = "PASS" if condition else "FAIL"
    print(f"[{status}] criterion {num}: {description} {detail}")
    assert condition, f"criterion {num} failed: {description} {detail}"


def test_criterion_1_optics_golden_numbers():
    audit = run_audit(load_scenario("paper_70m"))["beams"]
    golden = {
        "pump_link_rayleigh_m": 51.6,
        "spdc_link_rayleigh_m": 348.6,
        "pump_focus_rayleigh_m": 4.85e-3,
        "pump_collimated_waist_m": 2.58e-3,
        "spdc_collimated_waist_m": 9.48e-3,
        "pump_focus_waist_from_fiber_m": 25e-6,
        "pump_radius_at_distance_m": 4.35e-3,
        "spdc_radius_at_distance_m": 9.67e-3,
    }
    errors = {k: abs(audit[k] / v - 1.0) for k, v in golden.items()}
    worst = max(errors, key=errors.get)
    check(1, "audit reproduces the eight golden beam numbers within 1%",
          all(e <= 0.01 for e in errors.values()),
          f"(worst {worst}: {100 * errors[worst]:.2f}%)")


def test_criterion_2_coherence_numbers():
    spectrum = SourceSpectrum(405.5e-9, 160e6, "lorentzian")
    t_coh = coherence_time(spectrum)
    l_coh = coherence_length(t_coh)
    check(2, "160 MHz Lorentzian line gives t_coh ~ 2 ns and l_coh ~ 596 mm",
          1.95e-9 <= t_coh <= 2.05e-9 and abs(l_coh - 0.596) <= 1e-3,
          f"(t_coh {t_coh * 1e9:.4f} ns, l_coh {l_coh * 1e3:.2f} mm)")


def test_criterion_3_interference_algebra():
    g = 0.05
    factor_four = emission_probability(g, g, 0.0) == pytest.approx(4.0 * g * g, rel=1e-12)
    null = emission_probability(g, g, math.pi) == pytest.approx(0.0, abs=1e-15)
    phis = np.linspace(0.0, 2.0 * math.pi, 4097)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        g1, g2 = rng.uniform(0.001, 0.3, 2)
        p = g1 * g1 + g2 * g2 + 2.0 * g1 * g2 * np.cos(phis)
        scan_vis = (p.max() - p.min()) / (p.max() + p.min())
        worst = max(worst, abs(scan_vis - fringe_visibility_from_amplitudes(g1, g2)))
    check(3, "factor-4 enhancement, exact null, scan-vs-closed-form visibility",
          factor_four and null and worst <= 1e-10, f"(worst scan deviation {worst:.2e})")


def test_criterion_4_counting_formulas():
    rate, duration = 1.8e4, 10.0
    estimates = []
    for seed in range(100):
        rng = np.random.default_rng(10_000 + seed)
        streams = []
        for channel in ("signal", "idler"):
            n = rng.poisson(rate * duration)
            ts = np.sort(rng.uniform(0.0, duration, n) * 1e12).astype(np.int64)
            streams.append(TimeTagStream(channel, ts, duration_ps=int(duration * 1e12)))
        estimates.append(accidental_estimate(streams[0], streams[1], 1.5e-9, 5e-6))
    expected = rate * rate * 1.5e-9
    sem = math.sqrt(expected * duration * 100) / (duration * 100)
    mean = float(np.mean(estimates))
    accidental_ok = abs(mean - expected) <= 3.0 * sem
    bright = brightness(1.8e4, 1.8e4, 675.0)
    check(4, "accidental estimator hits C_A*C_B*t_c and brightness is exact",
          accidental_ok and bright == 4.8e5,
          f"(mean accidental {mean:.4f} vs {expected:.4f} cps, B {bright:.3g})")


def test_criterion_5_matcher_against_brute_force():
    rng = np.random.default_rng(77)
    mismatches = 0
    for k in range(10_000):
        if k < 9_700:
            sig, idl = random_tag_instance(rng, max_tags=64, spread_ps=6000)
        else:
            sig, idl = random_tag_instance(rng, max_tags=1000, spread_ps=3_000_000)
        window = int(rng.choice([100, 1500, 5000]))
        got = count_coincidences(sig, idl, window * 1e-12, keep_pairs=False)
        if got.total_coincidences != brute_greedy_count(sig, idl, window):
            mismatches += 1
    check(5, "streaming matcher equals the brute-force greedy oracle on 10^4 instances",
          mismatches == 0, f"({mismatches} mismatches)")

    n = 2_000_000
    rng2 = np.random.default_rng(78)
    sig = np.sort(rng2.integers(0, 10**14, n)).astype(np.int64)
    idl = np.sort(rng2.integers(0, 10**14, n)).astype(np.int64)
    count_coincidences(sig[:1000], idl[:1000], 1.5e-9)  # warm the JIT
    t0 = time.perf_counter()
    count_coincidences(sig, idl, 1.5e-9, keep_pairs=False)
    throughput = 2 * n / (time.perf_counter() - t0)
    check(5, "matcher throughput above the 10^7 tags/s soft target",
          throughput >= 1e7, f"({throughput:.3g} tags/s)")


def test_criterion_6_shot_noise_propagation():
    sigma = shot_noise_visibility_error(100.0, 1.96)
    closed_ok = abs(sigma - 0.0272) <= 0.0005
    rel_devs = []
    for mu_max, mu_min in ((100.0, 1.96), (1e3, 250.0), (1e4, 526.3)):
        est = monte_carlo_visibility([mu_max], [mu_min], n_samples=100_000, seed=5)
        closed = shot_noise_visibility_error(mu_max, mu_min)
        rel_devs.append(abs(est.std - closed) / closed)
    check(6, "closed-form sigma_V(100, 1.96) = 2.72% and Monte-Carlo converges to it",
          closed_ok and max(rel_devs) <= 0.05,
          f"(sigma {100 * sigma:.3f}%, worst MC deviation {100 * max(rel_devs):.2f}%)")


def test_criterion_7_end_to_end_statistical_reproduction():
    targets = {
        "paper_2m": (0.9615, 0.0286),
        "paper_20m": (0.9205, 0.0565),
        "paper_70m": (0.8390, 0.1298),
    }
    results = {}
    ok = True
    for preset, (ref_mean, ref_std) in targets.items():
        vis = ensemble_visibilities(load_scenario(preset), 100)
        mean, std = float(vis.mean()), float(vis.std(ddof=1))
        results[preset] = (mean, std)
        ok &= abs(mean - ref_mean) <= 0.04
        ok &= ref_std / 2.0 <= std <= ref_std * 2.0
    detail = "; ".join(
        f"{p}: {100 * m:.2f}% ± {100 * s:.2f}%" for p, (m, s) in results.items()
    )
    check(7, "100-seed preset ensembles reproduce the reference means and spreads",
          ok, f"({detail})")


def test_criterion_8_extrapolation():
    fit = linear_visibility_extrapolation([(2.0, 0.9615), (20.0, 0.9205), (70.0, 0.8390)])
    d50 = fit.distance_at(0.50)
    v500 = fit.visibility_at(500.0)
    check(8, "linear extrapolation reaches 50% near 250 m and ~10% at 500 m",
          240.0 <= d50 <= 280.0 and 0.05 <= v500 <= 0.12,
          f"(d50 {d50:.1f} m, V500 {100 * v500:.1f}%)")


def test_criterion_9_pipeline_property_suite(tmp_path):
    # noiseless commensurate cosine: exact recovery
    k = np.arange(996)
    vis_true = 0.9
    clean = 50.0 * (1.0 + vis_true * np.cos(2.0 * np.pi * (k - 5) / 12.0))
    ex = find_extrema(FringeTrace(clean, 0.07), 12.0)
    err = abs(visibility(ex.maxima.mean(), ex.minima.mean()) - vis_true)
    noiseless_ok = err < 1e-6

    # Poisson-noised traces: truth inside 3 shot-noise sigmas in >= 99/100
    period_bins = expected_period_bins(405.5e-9, 180e-9, 2.0, 70e-3)
    t = (np.arange(1000) + 0.5) * 0.07
    model = 47.25 * (1.0 + 0.96 * np.cos(2.0 * np.pi * t / 1.1264))
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(40_000 + seed)
        trace = FringeTrace(rng.poisson(model), 0.07)
        ex = find_extrema(trace, period_bins)
        v_hat = visibility(ex.maxima.mean(), ex.minima.mean())
        sigma = shot_noise_visibility_error(ex.maxima.mean(), ex.minima.mean())
        if abs(v_hat - 0.96) <= 3.0 * sigma:
            hits += 1
    poisson_ok = hits >= 99

    # determinism: byte-identical delimited outputs for a fixed seed
    scenario = load_scenario("paper_2m")
    names = ("tags.ptag", "trace_coincidences.csv", "trace_singles_signal.csv",
             "trace_singles_idler.csv", "ground_truth.json", "report.json")
    for sub in ("a", "b"):
        run_simulate(scenario, tmp_path / sub, seed=31415)
        run_analyze(scenario, run_dir=tmp_path / sub, out_dir=tmp_path / sub,
                    n_samples=10_000, figures=False)
    identical = all(
        (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
        for n in names
    )
    check(9, "noiseless recovery exact, noisy recovery within 3 sigma, byte determinism",
          noiseless_ok and poisson_ok and identical,
          f"(noiseless err {err:.2e}, hits {hits}/100, identical {identical})")


def test_criterion_10_fringe_geometry():
    scenario = load_scenario("paper_2m")
    period_bins = expected_period_bins(405.5e-9, 180e-9, 2.0, 70e-3)
    period_s = scenario.fringe_period_seconds()
    true_peaks = np.arange(0.0, 70.0, period_s)  # scan starts at phase 0
    counts_ok, recovery_ok = True, True
    details = []
    for seed in (1, 2, 3):
        result = simulate_scan(scenario, seed=seed)
        matched = count_coincidences(result.signal, result.idler,
                                     scenario.detector.coincidence_window)
        trace = bin_counts(matched, 70e-3, 70.0)
        ex = find_extrema(trace, period_bins)
        found_times = (ex.max_indices + 0.5) * 70e-3
        recovered = sum(
            np.any(np.abs(found_times - tp) <= period_s / 2.0) for tp in true_peaks
        )
        counts_ok &= abs(ex.n_maxima - 62) <= 2
        recovery_ok &= recovered >= 0.95 * true_peaks.size
        details.append(f"seed {seed}: {ex.n_maxima} maxima, {recovered}/{true_peaks.size} recovered")
    check(10, "scans show 62 ± 2 maxima and the finder recovers at least 95%",
          counts_ok and recovery_ok, "(" + "; ".join(details) + ")")
