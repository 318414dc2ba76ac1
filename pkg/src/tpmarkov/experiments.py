"""Experiment orchestration: config parsing, decay curves, smoothness tables,
periodic-obstruction reports, distribution dumps and bound ingredients.

Configs are JSON documents::

    {
      "experiment": "decay",
      "chain": [["9/10", "1/10", 0], [0, 0, 1], [1, 0, 0]],
      "emissions": [3, 1, 1],
      "initial": "stationary",
      "n_grid": [64, 128, 256]
    }

``chain`` may be replaced by ``"fixture": "A"`` (optionally with
``"fixture_params"``).  Each emission entry is either an integer score or a
``{"value": probability}`` mapping.  Probabilities may be numbers, decimal
strings or ``"p/q"`` rationals.  ``initial`` is ``"stationary"``, an explicit
vector or ``{"state": k}``.
"""
import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import fixtures
from .chain import TransitionMatrix, as_prob_vector, point_mass, stationary, validate
from .coupling import McConfig, estimate_beta
from .emissions import EmissionModel, dominating_envelope, envelope_moments
from .errors import AperiodicQ, ParseError, PeriodicQ, ValidationError
from .lattice import DEFAULT_LATTICE_CAP, beta_n, forward_joint, marginal_w, mean_var, tv
from .periodic import asymptotic_tv_gap, derive_period_structure, equidistribution_tests
from .returns import (ZERO_GEOMETRIC_TERM, GeometricTerm, beta_tilde, coincidence_return_dist,
                      estimate_geometric_term, excursion_sum_dist, is_strongly_aperiodic, q_period,
                      renewal_lattice_span, split_state_zero, tau_moments, theorem1_bound)
from .tpoisson import DEFAULT_TP_TAIL, minimal_b, stein_tv_bound, tp_params, tp_pmf

EXPERIMENTS = ("decay", "period", "smoothness", "dist", "bound")
DEFAULT_GRID = tuple(2**k for k in range(6, 13))
DECAY_COLUMNS = ("n", "EW", "VarW", "d_TV", "beta", "theorem1_bound", "runtime_ms")
STEIN_B_MAX_N = 1024

DEFAULT_TOLERANCES = {
    "tp_tail": DEFAULT_TP_TAIL,
    "excursion_tail": 1e-10,
    "lattice_cap": DEFAULT_LATTICE_CAP,
}


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    P: TransitionMatrix
    m: EmissionModel
    initial: object
    initial_vector: np.ndarray
    n_grid: tuple = DEFAULT_GRID
    experiment: str = "decay"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    mc_replicates: int = 0
    geom_term: str = "estimate"
    output: str = None
    workers: int = 1
    d: int = None
    stein_b: bool = False
    source_hash: str = ""

    @property
    def stationary_start(self):
        return isinstance(self.initial, str) and self.initial == "stationary"


# ---------------------------------------------------------------- parsing

def _line_of(text, key):
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def _number(x, text, key):
    if isinstance(x, bool):
        raise ParseError(f"expected a number, got {x!r}", _line_of(text, key), key)
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return float(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(f"cannot read {x!r} as a probability", _line_of(text, key), key)


def _integer(x, text, key, minimum=None):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"expected an integer, got {x!r}", _line_of(text, key), key)
    if minimum is not None and x < minimum:
        raise ParseError(f"must be at least {minimum}, got {x}", _line_of(text, key), key)
    return x


def _parse_emissions(raw, text):
    if not isinstance(raw, list):
        raise ParseError("expected a list with one entry per state", _line_of(text, "emissions"), "emissions")
    pmfs = []
    for k, e in enumerate(raw):
        if isinstance(e, bool):
            raise ParseError(f"state {k}: bad emission {e!r}", _line_of(text, "emissions"), "emissions")
        if isinstance(e, int):
            pmfs.append({e: 1.0})
        elif isinstance(e, dict):
            pmf = {}
            for v, p in e.items():
                try:
                    iv = int(v)
                except ValueError:
                    raise ParseError(f"state {k}: emission value {v!r} is not an integer",
                                     _line_of(text, "emissions"), "emissions") from None
                pmf[iv] = _number(p, text, "emissions")
            pmfs.append(pmf)
        else:
            raise ParseError(f"state {k}: bad emission {e!r}", _line_of(text, "emissions"), "emissions")
    return EmissionModel.from_pmfs(pmfs)


def _parse_initial(raw, P, text):
    if raw == "stationary":
        return raw, stationary(P)
    if isinstance(raw, dict):
        if set(raw) != {"state"}:
            raise ParseError('expected {"state": k}', _line_of(text, "initial"), "initial")
        k = _integer(raw["state"], text, "initial", 0)
        if k >= P.size:
            raise ValidationError(f"initial state {k} does not exist (chain has {P.size} states)")
        return raw, point_mass(P.size, k)
    if isinstance(raw, list):
        return raw, as_prob_vector([_number(x, text, "initial") for x in raw], P.size)
    raise ParseError(f"unrecognised initial distribution {raw!r}", _line_of(text, "initial"), "initial")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment config, filling defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", 1)
    known = {"experiment", "fixture", "fixture_params", "chain", "emissions", "initial", "n_grid",
             "tolerances", "seed", "mc_replicates", "geom_term", "output", "workers", "d", "stein_b"}
    for key in doc:
        if key not in known:
            raise ParseError("unknown field", _line_of(text, key), key)

    experiment = doc.get("experiment", "decay")
    if experiment not in EXPERIMENTS:
        raise ParseError(f"experiment must be one of {EXPERIMENTS}", _line_of(text, "experiment"), "experiment")

    if "fixture" in doc:
        name = doc["fixture"]
        if name not in fixtures.FIXTURES:
            raise ParseError(f"unknown fixture {name!r}", _line_of(text, "fixture"), "fixture")
        params = {k: _number(v, text, "fixture_params") for k, v in doc.get("fixture_params", {}).items()}
        try:
            P, m = fixtures.FIXTURES[name](**params)
        except TypeError as e:
            raise ParseError(str(e), _line_of(text, "fixture_params"), "fixture_params") from None
        if "chain" in doc or "emissions" in doc:
            raise ParseError("give either a fixture or chain/emissions, not both", _line_of(text, "fixture"), "fixture")
    else:
        for key in ("chain", "emissions"):
            if key not in doc:
                raise ParseError("missing required field", None, key)
        rows = doc["chain"]
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise ParseError("chain must be a list of rows", _line_of(text, "chain"), "chain")
        if any(len(r) != len(rows) for r in rows):
            raise ParseError("chain must be square", _line_of(text, "chain"), "chain")
        P = validate(np.array([[_number(x, text, "chain") for x in r] for r in rows]))
        m = _parse_emissions(doc["emissions"], text)
        if m.n_states != P.size:
            raise ValidationError(f"{m.n_states} emission laws for a {P.size}-state chain")

    initial, lam = _parse_initial(doc.get("initial", "stationary"), P, text)

    grid = doc.get("n_grid", list(DEFAULT_GRID))
    if not isinstance(grid, list) or not grid:
        raise ParseError("n_grid must be a nonempty list", _line_of(text, "n_grid"), "n_grid")
    grid = tuple(_integer(n, text, "n_grid", 1) for n in grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError(f"n_grid must be strictly increasing, got {list(grid)}")

    tol = dict(DEFAULT_TOLERANCES)
    for k, v in doc.get("tolerances", {}).items():
        if k not in tol:
            raise ParseError(f"unknown tolerance {k!r}", _line_of(text, k), "tolerances")
        tol[k] = int(v) if k == "lattice_cap" else _number(v, text, k)

    seed = _integer(doc.get("seed", 0), text, "seed", 0)
    if seed >= 2**64:
        raise ValidationError("seed must fit in 64 bits")
    geom = doc.get("geom_term", "estimate")
    parse_geom_policy(geom)
    d = doc.get("d")
    if d is not None:
        d = _integer(d, text, "d", 2)
    stein_b = doc.get("stein_b", False)
    if not isinstance(stein_b, bool):
        raise ParseError("expected true or false", _line_of(text, "stein_b"), "stein_b")

    return ExperimentConfig(
        P=P, m=m, initial=initial, initial_vector=lam, n_grid=grid, experiment=experiment,
        tolerances=tol, seed=seed,
        mc_replicates=_integer(doc.get("mc_replicates", 0), text, "mc_replicates", 0),
        geom_term=geom, output=doc.get("output"),
        workers=_integer(doc.get("workers", 1), text, "workers", 1),
        d=d, stein_b=stein_b,
        source_hash=hashlib.sha256(text.encode("utf-8")).hexdigest(),
    )


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def parse_geom_policy(policy: str):
    """``"estimate"``, ``"zero"`` or ``"fixed:C,rho"``; returns ``(kind, C, rho)``."""
    if policy in ("estimate", "zero"):
        return policy, None, None
    if isinstance(policy, str) and policy.startswith("fixed:"):
        try:
            C, rho = (float(x) for x in policy[len("fixed:"):].split(","))
        except ValueError:
            raise ValidationError(f"bad geometric-term policy {policy!r}; expected fixed:<C>,<rho>") from None
        if C < 0 or rho <= 1:
            raise ValidationError("fixed geometric term needs C >= 0 and rho > 1")
        return "fixed", C, rho
    raise ValidationError(f"bad geometric-term policy {policy!r}")


# ---------------------------------------------------------------- helpers

def ols_slope(ns, ys) -> float:
    """Least-squares slope of ``log2 y`` against ``log2 n``; NaN if any ``y <= 0``."""
    ys = np.asarray(ys, dtype=float)
    if len(ys) < 2 or not np.all(ys > 0) or not np.all(np.isfinite(ys)):
        return float("nan")
    return float(np.polyfit(np.log2(ns), np.log2(ys), 1)[0])


@dataclass
class SmoothChain:
    """The chain used for quantities that need strong aperiodicity."""

    P: TransitionMatrix
    m: EmissionModel
    split: bool
    lattice_span: int
    notes: list


def excursion_law(cfg):
    return excursion_sum_dist(cfg.P, cfg.m, eps_tail=cfg.tolerances["excursion_tail"],
                              cap=cfg.tolerances["lattice_cap"])


def require_aperiodic(cfg):
    q = excursion_law(cfg)
    d = q_period(q)
    if d != 1:
        raise PeriodicQ(f"excursion-sum law has period {d}; use the period report instead")
    return q


def smooth_chain(cfg, q=None) -> SmoothChain:
    """Return the chain itself or its state-0 split, whichever is strongly aperiodic."""
    q = q if q is not None else require_aperiodic(cfg)
    notes = []
    P, m, split = cfg.P, cfg.m, False
    if not is_strongly_aperiodic(q):
        P, m, _ = split_state_zero(cfg.P, cfg.m)
        q = excursion_sum_dist(P, m, eps_tail=cfg.tolerances["excursion_tail"], cap=cfg.tolerances["lattice_cap"])
        split = True
        notes.append("state 0 split into two clones (excursion law aperiodic but not strongly aperiodic); "
                     "beta and bound columns refer to the split chain")
    span = renewal_lattice_span(q)
    if span > 1:
        notes.append(f"WARNING: (return time, excursion sum) pairs generate a lattice of index {span}; "
                     "W_n on {X_n = 0} lies in one coset fixed by n, so beta(n) does not decay")
    return SmoothChain(P, m, split, span, notes)


def geometric_term(cfg, P) -> GeometricTerm:
    kind, C, rho = parse_geom_policy(cfg.geom_term)
    if kind == "zero":
        return ZERO_GEOMETRIC_TERM
    if kind == "fixed":
        return GeometricTerm(C, rho, "fixed")
    return estimate_geometric_term(P, eps_tail=cfg.tolerances["excursion_tail"])


def _grid_map(fn, cfg):
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            return list(ex.map(fn, cfg.n_grid))
    return [fn(n) for n in cfg.n_grid]


def _law(cfg, n):
    J = forward_joint(cfg.P, cfg.m, cfg.initial_vector, n, cap=cfg.tolerances["lattice_cap"])
    W = marginal_w(J)
    ew, vw = mean_var(W)
    return W, ew, vw


@dataclass
class BoundIngredients:
    e_tau: float
    e_tau2: float
    ez3: float
    geom: GeometricTerm


def bound_ingredients(cfg, sc: SmoothChain) -> BoundIngredients:
    z = coincidence_return_dist(sc.P, eps_tail=cfg.tolerances["excursion_tail"])
    e_tau, e_tau2 = tau_moments(z)
    ez3 = envelope_moments(dominating_envelope(sc.m))[2]
    return BoundIngredients(e_tau, e_tau2, ez3, geometric_term(cfg, sc.P))


# ---------------------------------------------------------------- results

@dataclass
class Table:
    """Rows plus ``#`` comment lines; the CSV contract for every experiment."""

    columns: tuple
    rows: list
    comments: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _fmt(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(table: Table, fh):
    for c in table.comments:
        fh.write(f"# {c}\n")
    for k, v in table.summary.items():
        fh.write(f"# {k}: {_fmt(v) if isinstance(v, (int, float)) else v}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_fmt(x) for x in r])


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    write_csv(table, buf)
    return buf.getvalue()


def read_csv(text: str) -> Table:
    """Inverse of :func:`write_csv`: the comment block is kept verbatim."""
    comments, body = [], []
    for line in text.splitlines():
        (comments if line.startswith("#") else body).append(line)
    reader = csv.reader(body)
    columns = tuple(next(reader))
    rows = []
    for r in reader:
        rows.append([int(x) if x.lstrip("-").isdigit() else float(x) for x in r])
    return Table(columns, rows, [c[2:] for c in comments])


def _header(cfg, kind):
    return [f"tpmarkov {kind}", f"config_sha256: {cfg.source_hash}"]


# ---------------------------------------------------------------- experiments

def run_decay(cfg: ExperimentConfig) -> Table:
    """d_TV against TP, beta(n) and the stationary-start bound over the n grid."""
    q = require_aperiodic(cfg)
    sc = smooth_chain(cfg, q)
    comments = _header(cfg, "decay") + sc.notes
    ing = None
    if cfg.stationary_start:
        ing = bound_ingredients(cfg, sc)
        comments.append(f"geom_term: {ing.geom.describe()}")
    else:
        comments.append("geom_term: not used (non-stationary start; bound column is nan)")
    cap = cfg.tolerances["lattice_cap"]

    def row(n):
        t0 = time.perf_counter()
        W, ew, vw = _law(cfg, n)
        d_tv = tv(W, tp_pmf(tp_params(ew, vw), cfg.tolerances["tp_tail"]))
        beta = beta_n(sc.P, sc.m, n, cap)
        bound = float("nan")
        if ing is not None:
            bq = beta_tilde(sc.P, sc.m, n // 4, cap)
            bound = theorem1_bound(n, vw, ing.e_tau2, ing.ez3, bq, ing.geom.value(n))
        ms = (time.perf_counter() - t0) * 1e3
        return [n, ew, vw, d_tv, beta, bound, ms]

    rows = _grid_map(row, cfg)
    table = Table(DECAY_COLUMNS, rows, comments)
    ns = table.column("n")
    table.summary["slope_d_TV"] = ols_slope(ns, table.column("d_TV"))
    table.summary["slope_beta"] = ols_slope(ns, table.column("beta"))
    if ing is not None:
        table.summary["slope_theorem1_bound"] = ols_slope(ns, table.column("theorem1_bound"))
        bad = [r[0] for r in rows if r[0] >= 256 and not r[5] >= r[3]]
        if bad:
            comments.append(f"WARNING: bound below measured d_TV at n={bad} under geometric-term policy "
                            f"{ing.geom.describe()}")
    return table


def run_smoothness(cfg: ExperimentConfig) -> Table:
    """Exact beta(n) and, when ``mc_replicates > 0``, the Monte Carlo coupling bound."""
    sc = smooth_chain(cfg)
    comments = _header(cfg, "smoothness") + sc.notes
    mc = cfg.mc_replicates > 0
    cols = ("n", "beta") + (("mc_beta_bound", "mc_se") if mc else ())

    def row(n):
        r = [n, beta_n(sc.P, sc.m, n, cfg.tolerances["lattice_cap"])]
        if mc:
            # per-n seed offset keeps grid points independent yet reproducible
            est = estimate_beta(sc.P, sc.m, n, McConfig(cfg.mc_replicates, (cfg.seed + n) % 2**64, n))
            r += [est.value, est.se]
        return r

    table = Table(cols, _grid_map(row, cfg), comments)
    if mc:
        comments.append(f"mc: {cfg.mc_replicates} replicates, root seed {cfg.seed} (+n per grid point)")
    table.summary["slope_beta"] = ols_slope(table.column("n"), table.column("beta"))
    return table


def run_dist(cfg: ExperimentConfig) -> Table:
    """Dump ``L(W_n)`` and the fitted TP law for every n on the grid."""
    rows = []
    for n in cfg.n_grid:
        W, ew, vw = _law(cfg, n)
        tp = tp_pmf(tp_params(ew, vw), cfg.tolerances["tp_tail"])
        lo = min(W.support_min, tp.support_min)
        hi = max(W.support_max, tp.support_max)
        for w in range(lo, hi + 1):
            pw, pt = W.prob(w), tp.prob(w)
            if pw > 0 or pt > 0:
                rows.append([n, w, pw, pt])
    return Table(("n", "w", "p_W", "p_TP"), rows, _header(cfg, "dist"))


def stein_b_profile(P, m: EmissionModel, lam, n: int):
    """Per-index ``(a_i, b_i)`` for the Stein bound with ``a_i = Cov(Y_i, W)``.

    ``b_i`` is the smallest constant valid for every bounded ``f``, obtained
    from :func:`minimal_b` applied to the signed measure
    ``c_i(w) = E[Y_i; W = w] - E Y_i P(W = w) - a_i (P(W = w-1) - P(W = w))``.
    """
    P = validate(P)
    lam = as_prob_vector(lam, P.size)
    lo, table = m.dense()
    width = table.shape[1]
    ytable = table * (lo + np.arange(width))[None, :]
    PT = P.entries.T
    K1 = P.size

    def conv_rows(A, T):
        out = np.empty((K1, A.shape[1] + width - 1))
        for j in range(K1):
            out[j] = np.convolve(A[j], T[j])
        return out

    # R[s][k] = law of the next s emissions given the current state k (offset s*lo)
    R = [np.ones((K1, 1))]
    for _ in range(n - 1):
        R.append(P.entries @ conv_rows(R[-1], table))
    F = np.array(lam)[:, None]
    W = None
    parts = []
    for i in range(1, n + 1):
        A = PT @ F
        G = conv_rows(A, ytable)
        F = conv_rows(A, table)
        rest = R[n - i]
        EYW = sum(np.convolve(G[k], rest[k]) for k in range(K1))
        if W is None:
            W = sum(np.convolve(F[k], rest[k]) for k in range(K1))
        parts.append(EYW)
    w_off = n * lo
    w = w_off + np.arange(len(W))
    ew = float(W @ w)
    a, b = np.zeros(n), np.zeros(n)
    shifted = np.concatenate([[0.0], W])  # P(W = w - 1) on w_off .. w_off + len
    padded = np.concatenate([W, [0.0]])
    for i, EYW in enumerate(parts):
        eyi = float(EYW.sum())
        a[i] = float(EYW @ w) - eyi * ew
        c = np.concatenate([EYW, [0.0]]) - eyi * padded - a[i] * (shifted - padded)
        c[np.abs(c) < 1e-300] = 0.0
        # absorb rounding so the measure has exactly zero mass
        c[-1] -= c.sum()
        b[i] = minimal_b(c, w_off)
    return a, b, (w_off, W)


def run_bound(cfg: ExperimentConfig) -> Table:
    """Ingredients and value of the stationary-start bound at each n."""
    if not cfg.stationary_start:
        raise ValidationError("the bound experiment needs a stationary start")
    sc = smooth_chain(cfg)
    ing = bound_ingredients(cfg, sc)
    comments = _header(cfg, "bound") + sc.notes + [f"geom_term: {ing.geom.describe()}"]
    cols = ("n", "VarW", "E_tau", "E_tau2", "EZ3", "beta_tilde_quarter", "geometric_term",
            "theorem1_bound", "d_TV")
    if cfg.stein_b:
        cols += ("sum_b", "stein_bound")
        comments.append(f"stein_b: a_i = Cov(Y_i, W), b_i from the exact minimal constant; nan for n > {STEIN_B_MAX_N}")
    cap = cfg.tolerances["lattice_cap"]

    def row(n):
        W, ew, vw = _law(cfg, n)
        tpar = tp_params(ew, vw)
        d_tv = tv(W, tp_pmf(tpar, cfg.tolerances["tp_tail"]))
        bq = beta_tilde(sc.P, sc.m, n // 4, cap)
        g = ing.geom.value(n)
        r = [n, vw, ing.e_tau, ing.e_tau2, ing.ez3, bq, g,
             theorem1_bound(n, vw, ing.e_tau2, ing.ez3, bq, g), d_tv]
        if cfg.stein_b:
            if n <= STEIN_B_MAX_N:
                _, b, _ = stein_b_profile(cfg.P, cfg.m, cfg.initial_vector, n)
                sb = math.fsum(b)
                pts = W.points()
                tail = float(W.masses[pts < ew - vw].sum())
                r += [sb, stein_tv_bound(tpar.delta, sb, tpar.lam, tail)]
            else:
                r += [float("nan"), float("nan")]
        return r

    return Table(cols, _grid_map(row, cfg), comments)


def run_period_report(cfg: ExperimentConfig) -> dict:
    """Residue-class obstruction analysis for a periodic excursion law."""
    q = excursion_law(cfg)
    d_q = q_period(q)
    if d_q == 1:
        raise AperiodicQ("excursion-sum law is aperiodic; use the decay experiment instead")
    d = cfg.d or d_q
    s = derive_period_structure(cfg.P, cfg.m, d)
    lam = cfg.initial_vector
    eq = equidistribution_tests(s, lam)
    n = cfg.n_grid[-1]
    W, ew, vw = _law(cfg, n)
    tpar = tp_params(ew, vw)
    tp = tp_pmf(tpar, cfg.tolerances["tp_tail"])
    report = {
        "config_sha256": cfg.source_hash,
        "d": d,
        "excursion_period": d_q,
        "rho": list(s.rho),
        "r": list(s.r),
        "classes": [sorted(E) for E in s.classes],
        "pi_class_mass": list(eq.pi_class_mass),
        "lambda_class_mass": list(eq.lam_class_mass),
        "pi_equidistributed": eq.pi_uniform,
        "limit_residue_probs": list(eq.lam_limit),
        "limit_equidistributed": eq.lam_uniform_limit,
        "pi_at_roots_of_unity": [[z.real, z.imag] for z in eq.roots],
        "vanishing_roots": list(eq.vanishing),
        "admits_nonuniform_lambda": eq.admits_nonuniform_lambda,
        "n": n,
        "residue_masses_W": W.residue_masses(d).tolist(),
        "residue_masses_TP": tp.residue_masses(d).tolist(),
        "d_TV": tv(W, tp),
        "asymptotic_tv_gap": asymptotic_tv_gap(s, lam, tpar, d, cfg.tolerances["tp_tail"]),
    }
    return report


RUNNERS = {
    "decay": run_decay,
    "smoothness": run_smoothness,
    "dist": run_dist,
    "bound": run_bound,
    "period": run_period_report,
}


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    if "geom_term" in kw:
        parse_geom_policy(kw["geom_term"])
    return replace(cfg, **kw)

