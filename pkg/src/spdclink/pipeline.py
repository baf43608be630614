"""End-to-end runs: simulate, analyze, audit, extrapolate, reproduce.

Every function is deterministic given (scenario, seed): re-running writes
byte-identical CSV/JSON outputs.  Figures are rendered next to the
delimited outputs when requested.
"""

import math
from pathlib import Path

import numpy as np

from . import analysis, coincidence, optics, tagio, tagsim
from .coherence import (
    coherence_length,
    coherence_time,
    dc_condition,
    pump_condition,
)
from .errors import DegenerateInputError
from .optics import FocusingElement, GaussianBeam
from .rates import accidental_rate, brightness

TRACE_KINDS = ("coincidences", "singles_signal", "singles_idler")


def _trace_path(out_dir, kind):
    return Path(out_dir) / f"trace_{kind}.csv"


def run_simulate(scenario, out_dir, seed=None, tag_format="binary"):
    """Simulate one scan and write tag streams, traces and ground truth.

    Returns a dict of written paths.  ``tag_format`` selects the binary tag
    file or the CSV alternative.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = tagsim.simulate_scan(scenario, seed=seed)
    det = scenario.detector
    duration = result.signal.duration_ps / coincidence.PS_PER_S

    matched = coincidence.count_coincidences(
        result.signal, result.idler, det.coincidence_window
    )
    traces = {
        "coincidences": coincidence.bin_counts(
            matched, det.integration_time, duration,
            stage_velocity=scenario.scan.stage_velocity,
        ),
        "singles_signal": coincidence.bin_counts(
            result.signal, det.integration_time, duration,
            stage_velocity=scenario.scan.stage_velocity,
        ),
        "singles_idler": coincidence.bin_counts(
            result.idler, det.integration_time, duration,
            stage_velocity=scenario.scan.stage_velocity,
        ),
    }

    paths = {}
    if tag_format == "binary":
        paths["tags"] = out_dir / "tags.ptag"
        tagio.write_tags(paths["tags"], result.signal, result.idler)
    elif tag_format == "csv":
        paths["tags"] = out_dir / "tags.csv"
        tagio.write_tags_csv(paths["tags"], result.signal, result.idler)
    else:
        raise ValueError(f"unknown tag_format {tag_format!r}")
    for kind, trace in traces.items():
        paths[kind] = _trace_path(out_dir, kind)
        tagio.write_trace_csv(paths[kind], trace)
    paths["ground_truth"] = out_dir / "ground_truth.json"
    tagio.write_json(paths["ground_truth"], result.truth.to_dict())
    return {k: str(v) for k, v in paths.items()}


def _analyze_trace(trace, scenario, n_samples, mc_seed):
    """Run the full statistics pipeline on one fringe trace."""
    period_bins = analysis.expected_period_bins(
        scenario.source.center_wavelength,
        scenario.scan.stage_velocity,
        scenario.scan.fold_factor,
        trace.bin_duration,
    )
    extrema = analysis.find_extrema(trace, period_bins)
    section = {
        "n_bins": int(len(trace)),
        "period_bins": period_bins,
        "n_maxima": int(extrema.n_maxima),
        "n_minima": int(extrema.n_minima),
        "degenerate": False,
    }
    if extrema.n_maxima == 0 or extrema.n_minima == 0:
        section["degenerate"] = True
        return section, None
    max_mean = float(extrema.maxima.mean())
    min_mean = float(extrema.minima.mean())
    estimate = analysis.monte_carlo_visibility(
        extrema.maxima, extrema.minima, n_samples=n_samples, seed=mc_seed
    )
    fit = analysis.fit_cosine(trace, scenario.fringe_period_seconds())
    section.update(
        max_mean=max_mean,
        min_mean=min_mean,
        visibility=analysis.visibility(max_mean, min_mean),
        mc_visibility_mean=estimate.mean,
        mc_visibility_std=estimate.std,
        shot_noise_sigma=analysis.shot_noise_visibility_error(max_mean, min_mean),
        fit={
            "amplitude": fit.amplitude,
            "offset": fit.offset,
            "period_s": fit.period,
            "phase_rad": fit.phase,
            "residual_rms": fit.residual,
            "converged": fit.converged,
            "visibility": fit.visibility,
        },
    )
    return section, estimate


_REFERENCE_VISIBILITY_KEYS = {
    "coincidences": ("visibility_coincidences", "visibility_coincidences_std"),
    "singles_signal": ("visibility_signal", "visibility_signal_std"),
    "singles_idler": ("visibility_idler", "visibility_idler_std"),
}


def run_analyze(scenario, traces=None, run_dir=None, out_dir=None,
                n_samples=100_000, mc_seed=0, figures=True):
    """Analyze fringe traces: extrema, visibility distribution, fit.

    ``traces`` maps kind -> FringeTrace; alternatively ``run_dir`` points at
    a directory produced by run_simulate.  When ``out_dir`` is given the
    report JSON, visibility histograms and (optionally) figures are written
    there.
    """
    if traces is None:
        if run_dir is None:
            raise ValueError("need traces or run_dir")
        traces = {}
        for kind in TRACE_KINDS:
            path = _trace_path(run_dir, kind)
            if path.exists():
                traces[kind] = tagio.read_trace_csv(
                    path, stage_velocity=scenario.scan.stage_velocity
                )
    if not traces:
        raise DegenerateInputError("no fringe traces to analyze")

    report = {"scenario": scenario.to_dict(), "traces": {}, "comparison": []}
    estimates = {}
    for kind, trace in traces.items():
        section, estimate = _analyze_trace(trace, scenario, n_samples, mc_seed)
        report["traces"][kind] = section
        estimates[kind] = estimate
        ref_keys = _REFERENCE_VISIBILITY_KEYS.get(kind)
        if ref_keys and not section["degenerate"]:
            ref_v, ref_std = ref_keys
            if ref_v in scenario.reference:
                report["comparison"].append({
                    "quantity": f"visibility_{kind}",
                    "simulated": section["mc_visibility_mean"],
                    "reference": scenario.reference[ref_v],
                    "reference_std": scenario.reference.get(ref_std),
                })

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        tagio.write_json(out_dir / "report.json", report)
        for kind, estimate in estimates.items():
            if estimate is not None:
                tagio.write_histogram_csv(
                    out_dir / f"visibility_hist_{kind}.csv", estimate.samples
                )
        if figures:
            from . import plots

            for kind, trace in traces.items():
                section = report["traces"][kind]
                plots.save_fringe_figure(
                    trace, section, out_dir / f"fringe_{kind}.png"
                )
                if estimates[kind] is not None:
                    plots.save_visibility_histogram(
                        estimates[kind], out_dir / f"visibility_hist_{kind}.png",
                        reference=report["scenario"]["reference"].get(
                            _REFERENCE_VISIBILITY_KEYS.get(kind, (None,))[0]
                        ),
                    )
    return report


def run_audit(scenario):
    """Tabulate the scenario's beam-transport and coherence numbers."""
    lam_p = scenario.optics_wavelength
    b = scenario.beams
    mirror = FocusingElement(b.collimating_mirror, b.aperture)
    lens = FocusingElement(b.focus_lens, b.aperture)

    fiber_beam = GaussianBeam(lam_p, b.fiber_collimated_waist)
    pump_focus_from_fiber = optics.conjugate_waist(fiber_beam, lens)
    pump_focus = GaussianBeam(lam_p, b.pump_focus_waist)
    pump_link = optics.conjugate_waist(pump_focus, mirror)
    pump_link = GaussianBeam(lam_p, pump_link.waist_radius)
    spdc_focus = GaussianBeam(b.spdc_wavelength, b.spdc_waist)
    spdc_link = optics.conjugate_waist(spdc_focus, mirror)
    spdc_link = GaussianBeam(b.spdc_wavelength, spdc_link.waist_radius)

    pump_ap = optics.aperture_check(pump_link, scenario.distance, b.aperture)
    spdc_ap = optics.aperture_check(spdc_link, scenario.distance, b.aperture)

    t_coh = coherence_time(scenario.source)
    l_coh = coherence_length(t_coh)
    pump_cond = pump_condition(scenario.paths)
    dc_cond = dc_condition(scenario.paths)

    det = scenario.detector
    tau = scenario.link.transmission
    singles_signal = scenario.link.pair_rate * det.efficiency_signal * tau
    singles_idler = scenario.link.pair_rate * det.efficiency_idler * tau
    coincidences = (
        scenario.link.pair_rate * det.efficiency_signal * det.efficiency_idler * tau**2
    )
    audit = {
        "beams": {
            "pump_focus_waist_from_fiber_m": pump_focus_from_fiber.waist_radius,
            "pump_focus_waist_m": b.pump_focus_waist,
            "pump_focus_rayleigh_m": optics.rayleigh_length(pump_focus),
            "pump_collimated_waist_m": pump_link.waist_radius,
            "pump_link_rayleigh_m": optics.rayleigh_length(pump_link),
            "spdc_collimated_waist_m": spdc_link.waist_radius,
            "spdc_link_rayleigh_m": optics.rayleigh_length(spdc_link),
            "pump_radius_at_distance_m": optics.beam_radius_at(pump_link, scenario.distance),
            "spdc_radius_at_distance_m": optics.beam_radius_at(spdc_link, scenario.distance),
            "pump_aperture_ratio": pump_ap.ratio,
            "spdc_aperture_ratio": spdc_ap.ratio,
            "aperture_passed": bool(pump_ap.passed and spdc_ap.passed),
            "xi_spdc": optics.matched_spdc_focal_parameter(b.xi_pump),
            "peak_intensity_w_cm2": optics.peak_intensity(
                scenario.pump_power, b.pump_focus_waist
            ),
        },
        "coherence": {
            "pump_coherence_time_s": t_coh,
            "pump_coherence_length_m": l_coh,
            "pump_condition_satisfied": bool(pump_cond.satisfied),
            "pump_condition_margin_m": pump_cond.margin,
            "dc_condition_satisfied": bool(dc_cond.satisfied),
            "dc_condition_margin_m": dc_cond.margin,
            "pump_coherence_factor": scenario.pump_coherence_factor(),
        },
        "counting": {
            "singles_signal_cps": singles_signal,
            "singles_idler_cps": singles_idler,
            "coincidence_cps": coincidences,
            "accidental_cps": accidental_rate(
                singles_signal, singles_idler, det.coincidence_window
            ),
            "brightness_cps": (
                brightness(singles_signal, singles_idler, coincidences)
                if coincidences > 0.0
                else None
            ),
            "fringe_period_s": scenario.fringe_period_seconds(),
            "fringes_per_scan": scenario.scan.duration / scenario.fringe_period_seconds(),
        },
    }
    audit["comparison"] = _audit_comparison(scenario, audit)
    return audit


_AUDIT_REFERENCE_MAP = {
    "rayleigh_pump_link": ("beams", "pump_link_rayleigh_m"),
    "rayleigh_spdc_link": ("beams", "spdc_link_rayleigh_m"),
    "rayleigh_pump_focus": ("beams", "pump_focus_rayleigh_m"),
    "pump_collimated_waist": ("beams", "pump_collimated_waist_m"),
    "spdc_collimated_waist": ("beams", "spdc_collimated_waist_m"),
    "pump_focus_waist": ("beams", "pump_focus_waist_from_fiber_m"),
    "pump_radius_at_distance": ("beams", "pump_radius_at_distance_m"),
    "spdc_radius_at_distance": ("beams", "spdc_radius_at_distance_m"),
    "singles_rate": ("counting", "singles_signal_cps"),
    "coincidence_rate": ("counting", "coincidence_cps"),
    "brightness": ("counting", "brightness_cps"),
}


def _audit_comparison(scenario, audit):
    rows = []
    for ref_key, (section, key) in _AUDIT_REFERENCE_MAP.items():
        if ref_key in scenario.reference:
            computed = audit[section][key]
            reference = scenario.reference[ref_key]
            rows.append({
                "quantity": ref_key,
                "computed": computed,
                "reference": reference,
                "ratio": computed / reference if reference else None,
            })
    return rows


def run_extrapolate(points):
    """Least-squares visibility-vs-distance line with the headline readouts.

    ``points`` is a sequence of (distance_m, visibility) pairs; visibility
    as a fraction in [0, 1].
    """
    fit = analysis.linear_visibility_extrapolation(points)
    degenerate = fit.slope == 0.0

    def dist(v):
        d = fit.distance_at(v)
        return None if math.isinf(d) else d

    return {
        "points": [{"distance_m": d, "visibility": v} for d, v in points],
        "slope_per_m": fit.slope,
        "intercept": fit.intercept,
        "visibility_at_250m": fit.visibility_at(250.0),
        "visibility_at_500m": fit.visibility_at(500.0),
        "distance_at_50pct_m": dist(0.50),
        "distance_at_10pct_m": dist(0.10),
        "degenerate_slope": degenerate,
    }


def extrapolate_reports(report_paths):
    """run_extrapolate over analysis report files (needs >= 2)."""
    points = []
    for path in report_paths:
        report = tagio.read_json(path)
        section = report["traces"]["coincidences"]
        if section.get("degenerate"):
            raise DegenerateInputError(f"{path}: degenerate coincidence trace")
        points.append(
            (report["scenario"]["distance_m"], section["mc_visibility_mean"])
        )
    if len(points) < 2:
        raise ValueError("need at least two analysis reports")
    return run_extrapolate(points)


def _light_visibility(scenario, seed):
    """Extrema-mean coincidence visibility of one in-memory run."""
    result = tagsim.simulate_scan(scenario, seed=seed)
    det = scenario.detector
    duration = result.signal.duration_ps / coincidence.PS_PER_S
    matched = coincidence.count_coincidences(
        result.signal, result.idler, det.coincidence_window
    )
    trace = coincidence.bin_counts(matched, det.integration_time, duration)
    period_bins = analysis.expected_period_bins(
        scenario.source.center_wavelength,
        scenario.scan.stage_velocity,
        scenario.scan.fold_factor,
        det.integration_time,
    )
    extrema = analysis.find_extrema(trace, period_bins)
    if extrema.n_maxima == 0 or extrema.n_minima == 0:
        return math.nan
    return analysis.visibility(extrema.maxima.mean(), extrema.minima.mean())


def ensemble_visibilities(scenario, n_runs, base_seed=None):
    """Coincidence visibility of ``n_runs`` independent scans (seeds base+k)."""
    if base_seed is None:
        base_seed = scenario.scan.seed
    return np.array([_light_visibility(scenario, base_seed + k) for k in range(n_runs)])


def run_reproduce(out_root, presets=("paper_2m", "paper_20m", "paper_70m"),
                  seed=None, ensemble=20, n_samples=100_000, figures=True,
                  tag_format="binary"):
    """Run every preset end-to-end and emit the comparison summary.

    For each preset: audit, one fully written simulate+analyze run, and an
    optional multi-seed ensemble for mean/std statistics.  Emits a combined
    JSON report, a plain-text comparison table, and the distance-scaling
    extrapolation.
    """
    from .scenario import load_scenario

    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    summary = {"presets": {}, "extrapolation": None}
    scaling_points = []
    scaling_refs = []
    for preset in presets:
        scenario = load_scenario(preset)
        base_seed = seed if seed is not None else scenario.scan.seed
        preset_dir = out_root / preset
        paths = run_simulate(scenario, preset_dir, seed=base_seed, tag_format=tag_format)
        report = run_analyze(
            scenario, run_dir=preset_dir, out_dir=preset_dir,
            n_samples=n_samples, figures=figures,
        )
        audit = run_audit(scenario)
        tagio.write_json(preset_dir / "audit.json", audit)

        section = report["traces"]["coincidences"]
        if ensemble > 1:
            vis = ensemble_visibilities(scenario, ensemble, base_seed)
            vis = vis[np.isfinite(vis)]
            ens = {
                "n_runs": int(ensemble),
                "mean": float(vis.mean()),
                "std": float(vis.std(ddof=1)),
            }
        else:
            ens = {
                "n_runs": 1,
                "mean": section.get("mc_visibility_mean", math.nan),
                "std": section.get("mc_visibility_std", math.nan),
            }
        summary["presets"][preset] = {
            "distance_m": scenario.distance,
            "paths": paths,
            "visibility": ens,
            "reference_visibility": scenario.reference.get("visibility_coincidences"),
            "reference_std": scenario.reference.get("visibility_coincidences_std"),
            "audit_comparison": audit["comparison"],
            "trace_sections": report["traces"],
        }
        scaling_points.append((scenario.distance, ens["mean"]))
        ref = scenario.reference.get("visibility_coincidences")
        if ref is not None:
            scaling_refs.append((scenario.distance, ref))

    summary["extrapolation"] = run_extrapolate(scaling_points)
    if len(scaling_refs) >= 2:
        summary["reference_extrapolation"] = run_extrapolate(scaling_refs)
    tagio.write_json(out_root / "reproduce_report.json", summary)
    table = format_comparison_table(summary)
    (out_root / "comparison_table.txt").write_text(table)
    if figures:
        from . import plots

        plots.save_scaling_figure(
            scaling_points, summary["extrapolation"],
            out_root / "scaling.png", reference_points=scaling_refs,
        )
    return summary


def format_comparison_table(summary):
    """Human-readable comparison of simulated vs reference visibilities."""
    lines = [
        f"{'preset':<12}{'dist':>6}  {'V_sim':>14}  {'V_ref':>14}  {'delta':>7}",
        "-" * 60,
    ]
    for preset, entry in summary["presets"].items():
        ens = entry["visibility"]
        ref = entry.get("reference_visibility")
        ref_std = entry.get("reference_std")
        sim = f"{100 * ens['mean']:6.2f} ± {100 * ens['std']:5.2f}%"
        if ref is not None:
            ref_txt = f"{100 * ref:6.2f}"
            ref_txt += f" ± {100 * ref_std:5.2f}%" if ref_std is not None else "      %"
            delta = f"{100 * (ens['mean'] - ref):+7.2f}"
        else:
            ref_txt, delta = "n/a", ""
        lines.append(
            f"{preset:<12}{entry['distance_m']:>5.0f}m  {sim:>14}  {ref_txt:>14}  {delta:>7}"
        )
    ext = summary.get("extrapolation")
    if ext:
        lines.append("")
        lines.append(
            "extrapolation: V(250 m) = {:.1f}%, V(500 m) = {:.1f}%, "
            "50% reach = {} m, 10% reach = {} m".format(
                100 * ext["visibility_at_250m"],
                100 * ext["visibility_at_500m"],
                "inf" if ext["distance_at_50pct_m"] is None
                else f"{ext['distance_at_50pct_m']:.0f}",
                "inf" if ext["distance_at_10pct_m"] is None
                else f"{ext['distance_at_10pct_m']:.0f}",
            )
        )
    return "\n".join(lines) + "\n"
