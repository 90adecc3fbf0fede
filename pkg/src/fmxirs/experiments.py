"""Reproducible experiment runs: config parsing, sweeps, CSV + manifest output.

Configs are INI files (stdlib configparser dialect, documented in the README
and versioned in the manifest) with one section per concern. Every field has
a per-experiment default, so an empty config runs the stock setup; the CLI
can override seed, trial count and output directory. A run writes one CSV
per experiment plus a JSON manifest recording the resolved config, its hash,
the seed, the package version and the wall time. For a fixed config and seed
the CSV bytes are identical across runs.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError
from .estimation import mmse_coefficients
from .geometry import (PathlossModel, SceneGeometry, assemble_two_path_channels,
                       classical_two_path_gain)
from .multipath import (FrequencyPlan, StackLayout, complex_normal,
                        condition_number_db, draw_stacked_channels,
                        pair_correlation, reflected_correlation_matrix,
                        uniform_delay_moments)
from .rate import expected_stacked_energy, rate_curve, rate_upper_bound
from .waveform import LinkScene, Reflector, SignalGrid, SinglePathLink, simulate_link

EXPERIMENTS = ("fig2", "fig3", "fig4a", "fig4b", "validate")
CONFIG_DIALECT = "ini/1"

# vectorized trials per chunk in the estimation sweep
_CHUNK = 1000


@dataclass
class GeometryConfig:
    user: tuple = (-50.0, 30.0, 1.0)
    bs: tuple = (30.0, 30.0, 10.0)
    surface: tuple = (0.0, 0.0, 4.0)
    bs_spacing: float = 0.1
    surface_spacing: float = 0.1
    antennas: int = 1


@dataclass
class PathlossConfig:
    reference_distance: float = 50.0
    exponent: float = 2.0
    speed: float = 3.0e8
    carrier_hz: float = 3.0e9
    delay_spread_s: float = 1.0e-7
    amplitude_law: bool = True


@dataclass
class PlanConfig:
    rows: int = 2
    cols: int = 2
    spacing_ratio: float = 1.0
    tau_max: float = 1.0
    carrier: float = 1024.0
    paths: int = 256
    bandwidth: float = 0.0
    amplitude_law: str = "rayleigh"


@dataclass
class SweepConfig:
    power_db_start: float = -10.0
    power_db_stop: float = 30.0
    power_db_step: float = 2.0
    user_x_start: float = 2.0
    user_x_stop: float = 16.0
    points: int = 2801
    ratio_step: float = 0.05
    ratio_max: float = 3.0
    sv_values: tuple = (1, 2)


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 20240
    trials: int = 10000
    out: str = "results"
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    pathloss: PathlossConfig = field(default_factory=PathlossConfig)
    plan: PlanConfig = field(default_factory=PlanConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)


def default_config(experiment: str) -> ExperimentConfig:
    """Stock configuration for each experiment."""
    if experiment not in EXPERIMENTS:
        raise ConfigurationError(f"[run] experiment: unknown experiment {experiment!r}")
    cfg = ExperimentConfig(experiment=experiment)
    if experiment == "fig2":
        cfg.plan = replace(cfg.plan, rows=1, cols=1, spacing_ratio=0.1)
        cfg.trials = 1
    elif experiment == "fig4b":
        cfg.geometry = replace(cfg.geometry, antennas=8)
    elif experiment == "validate":
        cfg.trials = 4000
    return cfg


_SECTION_FIELDS = {
    "geometry": GeometryConfig,
    "pathloss": PathlossConfig,
    "plan": PlanConfig,
    "sweep": SweepConfig,
}


def _coerce(section: str, key: str, text: str, like):
    try:
        if isinstance(like, bool):
            low = text.strip().lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if isinstance(like, int):
            return int(text)
        if isinstance(like, float):
            return float(text)
        if isinstance(like, tuple):
            parts = text.replace(",", " ").split()
            kind = type(like[0]) if like else float
            return tuple(kind(p) for p in parts)
        return text
    except ValueError as exc:
        raise ConfigurationError(f"[{section}] {key}: {exc}") from None


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Parse INI config text on top of the experiment's defaults."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None

    run_section = dict(parser.items("run")) if parser.has_section("run") else {}
    exp = experiment or run_section.get("experiment")
    if not exp:
        raise ConfigurationError("[run] experiment: missing (pass a subcommand or set it in the config)")
    cfg = default_config(exp)

    for key, text_value in run_section.items():
        if key == "experiment":
            if text_value != exp:
                raise ConfigurationError(
                    f"[run] experiment: config says {text_value!r} but {exp!r} was requested")
            continue
        if key not in ("seed", "trials", "out"):
            raise ConfigurationError(f"[run] {key}: unknown key")
        setattr(cfg, key, _coerce("run", key, text_value, getattr(cfg, key)))

    for section, cls in _SECTION_FIELDS.items():
        if not parser.has_section(section):
            continue
        block = getattr(cfg, section)
        known = {f.name for f in fields(cls)}
        for key, text_value in parser.items(section):
            if key not in known:
                raise ConfigurationError(f"[{section}] {key}: unknown key")
            value = _coerce(section, key, text_value, getattr(block, key))
            setattr(block, key, value)

    for name in parser.sections():
        if name not in ("run", *_SECTION_FIELDS):
            raise ConfigurationError(f"[{name}]: unknown section")
    return cfg


def _ini_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return " ".join(_ini_value(v) for v in value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def config_to_ini(cfg: ExperimentConfig) -> str:
    """Serialize a config back to INI text; parse_config inverts this exactly."""
    out = io.StringIO()
    out.write("[run]\n")
    for key in ("experiment", "seed", "trials", "out"):
        out.write(f"{key} = {_ini_value(getattr(cfg, key))}\n")
    for section, cls in _SECTION_FIELDS.items():
        out.write(f"\n[{section}]\n")
        block = getattr(cfg, section)
        for f in fields(cls):
            out.write(f"{f.name} = {_ini_value(getattr(block, f.name))}\n")
    return out.getvalue()


def load_config(experiment: str, path: str | None = None, seed: int | None = None,
                trials: int | None = None, out: str | None = None) -> ExperimentConfig:
    """Resolve defaults, optional config file, and CLI overrides, in that order."""
    if path is not None:
        cfg = parse_config(Path(path).read_text(), experiment)
    else:
        cfg = default_config(experiment)
    if seed is not None:
        cfg.seed = int(seed)
    if trials is not None:
        if trials < 1:
            raise ConfigurationError(f"[run] trials: must be >= 1, got {trials}")
        cfg.trials = int(trials)
    if out is not None:
        cfg.out = str(out)
    return cfg


# ---------------------------------------------------------------------------
# builders shared by the experiments


def _stochastic_plan(cfg: ExperimentConfig, rows=None, cols=None, ratio=None) -> FrequencyPlan:
    p = cfg.plan
    coherence = 1.0 / (2.0 * p.tau_max)
    return FrequencyPlan(
        carrier=p.carrier,
        v=rows if rows is not None else p.rows,
        s=cols if cols is not None else p.cols,
        spacing=(ratio if ratio is not None else p.spacing_ratio) * coherence,
        tau_max=p.tau_max,
        bandwidth=p.bandwidth,
    )


def _geometric_plan(cfg: ExperimentConfig) -> FrequencyPlan:
    coherence = 1.0 / (2.0 * cfg.pathloss.delay_spread_s)
    return FrequencyPlan(
        carrier=cfg.pathloss.carrier_hz,
        v=cfg.plan.rows,
        s=cfg.plan.cols,
        spacing=cfg.plan.spacing_ratio * coherence,
        tau_max=cfg.pathloss.delay_spread_s,
    )


def _scene_geometry(cfg: ExperimentConfig) -> SceneGeometry:
    g = cfg.geometry
    return SceneGeometry(user=np.array(g.user), bs=np.array(g.bs),
                         surface=np.array(g.surface), bs_spacing=g.bs_spacing,
                         surface_spacing=g.surface_spacing,
                         m=g.antennas, v=cfg.plan.rows, s=cfg.plan.cols)


def _pathloss(cfg: ExperimentConfig) -> PathlossModel:
    p = cfg.pathloss
    return PathlossModel(reference_distance=p.reference_distance, exponent=p.exponent,
                         speed=p.speed, amplitude_law=p.amplitude_law)


def _power_grid_db(cfg: ExperimentConfig) -> np.ndarray:
    sw = cfg.sweep
    if sw.power_db_step <= 0:
        raise ConfigurationError("[sweep] power_db_step: must be positive")
    n = int(round((sw.power_db_stop - sw.power_db_start) / sw.power_db_step))
    return sw.power_db_start + sw.power_db_step * np.arange(n + 1)


def _db_to_linear(db):
    return 10.0 ** (np.asarray(db) / 10.0)


def _gain_db(amplitude_sq):
    return 10.0 * np.log10(amplitude_sq)


# ---------------------------------------------------------------------------
# experiments


def run_fig2(cfg: ExperimentConfig):
    """Channel gain vs user-receiver distance: fading two-ray baseline against
    the fluctuation-free direct/+/- branches of the mixing link."""
    sw = cfg.sweep
    geom0 = _scene_geometry(cfg)
    pl = _pathloss(cfg)
    plan = _geometric_plan(cfg)
    xs = np.linspace(sw.user_x_start, sw.user_x_stop, sw.points)
    rows = []
    for x in xs:
        user = np.array([x, geom0.user[1], geom0.user[2]])
        geom = geom0.replace_user(user)
        channels = assemble_two_path_channels(geom, pl, plan)
        classical = classical_two_path_gain(geom, pl, plan.carrier)
        distance = float(np.linalg.norm(user - geom.bs_positions()[0]))
        rows.append((
            distance,
            _gain_db(classical),
            _gain_db(float(np.abs(channels.direct[0]) ** 2)),
            _gain_db(float(np.abs(channels.cascade_plus[0, 0, 0]) ** 2)),
            _gain_db(float(np.abs(channels.cascade_minus[0, 0, 0]) ** 2)),
        ))
    rows.sort(key=lambda r: r[0])
    header = ["distance_m", "gain_classical_db", "gain_direct_db", "gain_plus_db", "gain_minus_db"]
    return header, rows


def _branch_rows(est, truth, layout: StackLayout):
    """Aggregate (trials, dim) estimates into direct / reflected NMSE figures.

    Returns {branch: (nmse, nmse_avg)} where nmse normalizes by the branch's
    own energy and nmse_avg by the average entry energy of the full stack.
    """
    err_sq = np.abs(est - truth) ** 2
    truth_sq = np.abs(truth) ** 2
    mean_entry_energy = float(np.mean(truth_sq))
    out = {}
    for branch, sl in (("direct", layout.direct), ("reflected", layout.cascade_slice())):
        mse = float(np.mean(err_sq[:, sl]))
        energy = float(np.mean(truth_sq[:, sl]))
        out[branch] = (mse / energy, mse / mean_entry_energy)
    return out


def run_fig3(cfg: ExperimentConfig):
    """Estimation NMSE vs transmit power for both channel models.

    The deterministic two-ray model is estimated with least squares; the
    rich-scattering model with both least squares and the Bayesian linear
    estimator. Long-format rows, one per (model, branch, estimator, power).
    """
    m = cfg.geometry.antennas
    layout = StackLayout(v=cfg.plan.rows, s=cfg.plan.cols, m=m)
    powers_db = _power_grid_db(cfg)
    pilot = 1.0 + 0.0j

    h_two = assemble_two_path_channels(_scene_geometry(cfg), _pathloss(cfg),
                                       _geometric_plan(cfg)).stacked()
    plan = _stochastic_plan(cfg)

    rows = []
    children = np.random.SeedSequence(cfg.seed).spawn(powers_db.size)
    for p_db, child in zip(powers_db, children):
        rng = np.random.default_rng(child)
        p = float(_db_to_linear(p_db))
        sqrt_p = np.sqrt(p)
        coeff_mmse = mmse_coefficients(layout, p)

        results = {}
        # two-ray model: channel fixed, noise varies
        noise = complex_normal(rng, (cfg.trials, layout.dim))
        truth = np.broadcast_to(h_two, (cfg.trials, layout.dim))
        est = np.conj(pilot) / sqrt_p * (sqrt_p * h_two * pilot + noise)
        results[("two_path", "ls")] = _branch_rows(est, truth, layout)

        # rich-scattering model: fresh channels and noise, both estimators
        done = 0
        est_ls = np.empty((cfg.trials, layout.dim), dtype=complex)
        est_mm = np.empty((cfg.trials, layout.dim), dtype=complex)
        truth_inf = np.empty((cfg.trials, layout.dim), dtype=complex)
        while done < cfg.trials:
            n = min(_CHUNK, cfg.trials - done)
            h = draw_stacked_channels(plan, m, n, rng, paths=cfg.plan.paths,
                                      amplitude_law=cfg.plan.amplitude_law)
            y = sqrt_p * h * pilot + complex_normal(rng, (n, layout.dim))
            truth_inf[done:done + n] = h
            est_ls[done:done + n] = np.conj(pilot) / sqrt_p * y
            est_mm[done:done + n] = coeff_mmse * np.conj(pilot) * y
            done += n
        results[("infinite", "ls")] = _branch_rows(est_ls, truth_inf, layout)
        results[("infinite", "mmse")] = _branch_rows(est_mm, truth_inf, layout)

        for (model, estimator), branches in results.items():
            for branch, (value, value_avg) in branches.items():
                rows.append((model, branch, estimator, float(p_db), value, value_avg))

    header = ["model", "branch", "estimator", "p_db", "nmse", "nmse_avg_energy"]
    return header, rows


def run_fig4a(cfg: ExperimentConfig):
    """Condition number of the reflected-branch correlation matrix vs the
    spacing-to-coherence ratio, for both correlation models."""
    sw = cfg.sweep
    if sw.ratio_step <= 0 or sw.ratio_max <= 0:
        raise ConfigurationError("[sweep] ratio_step/ratio_max: must be positive")
    n_ratios = int(round(sw.ratio_max / sw.ratio_step))
    rows = []
    for sv in sw.sv_values:
        for model in ("pair_only", "shared_scatterers"):
            for k in range(1, n_ratios + 1):
                ratio = k * sw.ratio_step
                plan = _stochastic_plan(cfg, rows=sv, cols=sv, ratio=ratio)
                f = reflected_correlation_matrix(plan, model)
                rows.append((ratio, sv, model, condition_number_db(f)))
    header = ["i", "sv", "model", "cond_db"]
    return header, rows


def run_fig4b(cfg: ExperimentConfig):
    """Monte-Carlo rate, Jensen bound, and plain-array baseline vs power."""
    m = cfg.geometry.antennas
    plan = _stochastic_plan(cfg)
    powers_db = _power_grid_db(cfg)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    curve = rate_curve(plan, m, _db_to_linear(powers_db), cfg.trials, rng,
                       paths=cfg.plan.paths, amplitude_law=cfg.plan.amplitude_law)
    rows = [
        (float(p_db), curve.rate_mc[i], curve.rate_mc_se[i], curve.rate_bound[i],
         curve.rate_mimo[i], curve.rate_mimo_se[i])
        for i, p_db in enumerate(powers_db)
    ]
    header = ["p_db", "rate_mc", "rate_mc_se", "rate_bound", "rate_mimo", "rate_mimo_se"]
    return header, rows


def _closed_form_readout(scene: LinkScene, x: complex) -> dict[float, complex]:
    """Frequency-domain prediction for a scene: direct at 0, half-product
    cascades at +/- each mixing frequency with shifted-carrier phases."""
    fc = scene.grid.carrier
    d = scene.direct
    readout = {0.0: d.gain * np.exp(-2j * np.pi * fc * d.delay) * x}
    for r in scene.reflectors:
        h = r.to_surface.gain * np.exp(-2j * np.pi * fc * r.to_surface.delay)
        for sign in (+1.0, -1.0):
            g = r.to_receiver.gain * np.exp(-2j * np.pi * (fc + sign * r.mixing) * r.to_receiver.delay)
            readout[sign * float(r.mixing)] = 0.5 * h * g * x
    return readout


def run_validate(cfg: ExperimentConfig):
    """Cross-checks of the core numerics; one row per check."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    rows = []

    def check(name, value, expected, tol):
        rows.append((name, float(value), float(expected), float(tol),
                     "pass" if abs(value - expected) <= tol else "fail"))

    # waveform chain vs closed form on a randomized scene
    grid = SignalGrid()
    scene = LinkScene(
        direct=SinglePathLink(gain=rng.uniform(0.2, 2.0), delay=rng.uniform(0.0, 1.0)),
        reflectors=(
            Reflector(
                to_surface=SinglePathLink(gain=rng.uniform(0.2, 2.0), delay=rng.uniform(0.0, 1.0)),
                to_receiver=SinglePathLink(gain=rng.uniform(0.2, 2.0), delay=rng.uniform(0.0, 1.0)),
                mixing=8 * int(rng.integers(1, 9)),
            ),
        ),
        grid=grid,
    )
    x = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    readout = simulate_link(scene, x)
    expected = _closed_form_readout(scene, x)
    worst = max(abs(readout[f] - expected[f]) / abs(expected[f]) for f in expected)
    check("decoupling_rel_err", worst, 0.0, 1e-3)

    # correlation zeros at integer spacing ratios
    tau = cfg.plan.tau_max
    coherence = 1.0 / (2.0 * tau)
    worst_rho = max(pair_correlation(i * coherence, tau) for i in range(1, 9))
    check("pair_correlation_integer_zeros", worst_rho, 0.0, 1e-12)

    # delay moments against numeric quadrature
    from scipy.integrate import quad
    a, spread = 0.73, 1.31
    moments = uniform_delay_moments(a, spread)
    quad_cos = quad(lambda t: np.cos(2 * np.pi * a * t) / spread, 0.0, spread, limit=200)[0]
    check("delay_moment_cos_vs_quadrature", moments.cos - quad_cos, 0.0, 1e-9)

    # identity correlation matrix at integer ratio
    plan = _stochastic_plan(cfg, rows=2, cols=2, ratio=1.0)
    cond = condition_number_db(reflected_correlation_matrix(plan, "pair_only"))
    check("condition_db_integer_ratio", cond, 0.0, 1e-9)

    # least-squares error variance at p = 10
    layout = StackLayout(v=cfg.plan.rows, s=cfg.plan.cols, m=cfg.geometry.antennas)
    p = 10.0
    h = draw_stacked_channels(_stochastic_plan(cfg), layout.m, cfg.trials, rng,
                              paths=cfg.plan.paths, amplitude_law=cfg.plan.amplitude_law)
    noise = complex_normal(rng, h.shape)
    est = h + noise / np.sqrt(p)
    err_var = float(np.mean(np.abs(est - h) ** 2))
    check("ls_error_variance_p10", err_var, 1.0 / p, 0.1 / p)

    # stacked energy and Jensen bound at p = 1
    energy = float(np.mean(np.sum(np.abs(h) ** 2, axis=1)))
    expected_energy = expected_stacked_energy(layout.m, cfg.plan.cols, cfg.plan.rows)
    check("stacked_energy", energy, expected_energy, 0.05 * expected_energy)
    mc = float(np.mean(np.log2(1.0 + 1.0 * np.sum(np.abs(h) ** 2, axis=1))))
    bound = rate_upper_bound(layout.m, cfg.plan.cols, cfg.plan.rows, 1.0)
    check("rate_below_bound_p1", min(bound - mc, 0.0), 0.0, 1e-12)

    header = ["check", "value", "expected", "tolerance", "status"]
    return header, rows


_RUNNERS = {
    "fig2": run_fig2,
    "fig3": run_fig3,
    "fig4a": run_fig4a,
    "fig4b": run_fig4b,
    "validate": run_validate,
}


def _format_cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def run(cfg: ExperimentConfig) -> list[Path]:
    """Execute the configured experiment; returns [csv_path, manifest_path]."""
    if cfg.experiment not in _RUNNERS:
        raise ConfigurationError(f"[run] experiment: unknown experiment {cfg.experiment!r}")
    started = time.perf_counter()
    header, rows = _RUNNERS[cfg.experiment](cfg)
    elapsed = time.perf_counter() - started

    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{cfg.experiment}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])

    ini_text = config_to_ini(cfg)
    manifest = {
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "config_dialect": CONFIG_DIALECT,
        "config": asdict(cfg),
        "config_sha256": hashlib.sha256(ini_text.encode()).hexdigest(),
        "package_version": __version__,
        "wall_time_s": elapsed,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "outputs": [csv_path.name],
    }
    manifest_path = out_dir / f"{cfg.experiment}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, default=list) + "\n", encoding="utf-8")
    return [csv_path, manifest_path]
