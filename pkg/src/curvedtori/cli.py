"""Batch front-end: ``curvedtori <verb> [--config path] [--seed n] [--out dir] ...``.

Each run writes ``<out>/<mode>.csv`` and ``<out>/<mode>.json`` (manifest with
the canonical config, library version, wall time and diagnostics). Exit codes:
0 success, 2 configuration error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    DEFAULTS_HELP,
    MODES,
    Budgets,
    CoefficientSpec,
    ConfigError,
    ExperimentConfig,
    config_to_dict,
    parse_config,
)
from .dirac import (
    CoefficientMatrix,
    assemble_H,
    compression_bound,
    ds_commutator_residual,
    flat_dirac,
    identity_entries,
    lip_norm,
    literal_formula_residual,
    make_dirac,
    make_spinor_commutant,
    random_entries,
    random_spinor_commutant,
    sandwich_identity_residual,
    sandwich_lip,
)
from .errors import CurvedToriError
from .linalg import identity, op_norm
from .metric import (
    LipSeminorm,
    convergence_experiment,
    diameter,
    kernel_gap,
    leibniz_residual,
    mk_distance,
    mk_oracle_grid,
    pairing_delta,
    random_state,
    sandwich_delta,
    sandwich_delta_rigorous,
    task_rng,
)
from .torus import (
    clifford_rep,
    commutant_right,
    derivation,
    derivation_family,
    dual_action,
    fourier_assemble,
    left_regular,
    make_torus,
    modular_conj,
    random_element,
    tau,
    weyl,
)

log = logging.getLogger("curvedtori")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3
SLACK = 1e-9
# task-index offsets so that H, H', samples and states draw from disjoint streams
STREAM_H, STREAM_HPRIME, STREAM_SAMPLES, STREAM_STATES, STREAM_DIAM = 1, 2, 1000, 2000, 3000


class InvariantViolation(CurvedToriError):
    def __init__(self, name: str, seed: int, detail: str):
        self.name, self.seed = name, seed
        super().__init__(f"invariant violated: {name} (seed {seed}): {detail}")


@dataclass
class ResultRow:
    n: int
    length_fn: float
    delta_fwd: float
    delta_bwd: float
    lemma_bound: float
    closed_form_corrected: float
    closed_form_paper_literal: float
    empirical_ratio: float
    diam_flat: float


RESULT_COLUMNS = [f.name for f in fields(ResultRow)]
BOUND_COLUMNS = ("length_fn", "delta_fwd", "delta_bwd", "lemma_bound", "closed_form_corrected", "closed_form_paper_literal")


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row[c]) for c in columns])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


# ---------------------------------------------------------------- coefficient specs


def build_entries(spec: CoefficientSpec, torus, d: int, seed: int, stream: int):
    if spec.kind == "identity":
        return identity_entries(torus, d)
    if spec.kind == "scalar":
        return identity_entries(torus, d, spec.scalar)
    if spec.kind == "random":
        return random_entries(torus, d, task_rng(seed, stream), spec.magnitude, spec.band)
    return [[fourier_assemble(torus, {(m, n): complex(re, im) for m, n, re, im in cell}) for cell in row] for row in spec.table]


def build_spinor_commutant(spec: CoefficientSpec, torus, S: int, seed: int, stream: int):
    """Spinor-space version of a spec: entries b_jk become sum R_{b_jk} (x) E_jk."""
    if spec.kind == "identity":
        return make_spinor_commutant(torus, identity(torus.dim * S))
    if spec.kind == "scalar":
        return make_spinor_commutant(torus, spec.scalar * identity(torus.dim * S))
    if spec.kind == "random":
        return random_spinor_commutant(torus, S, task_rng(seed, stream), spec.magnitude)
    if len(spec.table) != S:
        raise ConfigError([f"table: sandwich mode needs a {S} x {S} table (spinor dimension)"])
    entries = build_entries(spec, torus, S, seed, stream)
    K = 0
    for j in range(S):
        for k in range(S):
            E = np.zeros((S, S))
            E[j, k] = 1
            K = K + np.kron(commutant_right(entries[j][k]).matrix, E)
    return make_spinor_commutant(torus, K)


def _samples(torus, count: int, seed: int):
    return [random_element(torus, task_rng(seed, STREAM_SAMPLES + i), hermitian=True) for i in range(count)]


def _flat_diameter(cfg: ExperimentConfig, torus, fam, cliff):
    L = LipSeminorm.from_dirac(make_dirac(torus, fam=fam, cliff=cliff), name="flat")
    b = cfg.budgets
    res = diameter(L, restarts=b.restarts, iterations=b.iterations, seed=cfg.seed + STREAM_DIAM, workers=cfg.workers)
    return res.value, {"diam_flat_ascent": res.diagnostics["ascent_value"], "diam_flat_best_restart": res.diagnostics["best_restart"]}


def _check_row(row: dict, seed: int) -> None:
    for c in BOUND_COLUMNS + ("empirical_ratio",):
        if not (row[c] >= 0 and math.isfinite(row[c])):
            raise InvariantViolation(f"{c} >= 0", seed, f"row {row['n']}: {row[c]}")
    if row["empirical_ratio"] > max(row["delta_fwd"], row["delta_bwd"]) + SLACK:
        raise InvariantViolation(
            "empirical_ratio <= max(delta_fwd, delta_bwd)",
            seed,
            f"row {row['n']}: {row['empirical_ratio']} > {max(row['delta_fwd'], row['delta_bwd'])}",
        )


# ---------------------------------------------------------------- modes


def _setup(cfg: ExperimentConfig):
    torus = make_torus(cfg.q, cfg.p)
    fam = derivation_family(torus, _directions(cfg.d))
    cliff = clifford_rep(cfg.d)
    return torus, fam, cliff


def _directions(d: int) -> np.ndarray:
    """Exponent directions of the d derivations: the two coordinate axes, then their sums."""
    base = [(1, 0), (0, 1), (1, 1), (1, -1)]
    return np.array([base[k % len(base)] for k in range(d)], dtype=int)


def run_bound(cfg: ExperimentConfig):
    torus, fam, cliff = _setup(cfg)
    H = assemble_H(build_entries(cfg.H_spec, torus, cfg.d, cfg.seed, STREAM_H))
    Hp = assemble_H(build_entries(cfg.Hprime_spec, torus, cfg.d, cfg.seed, STREAM_HPRIME))
    diam, diag = _flat_diameter(cfg, torus, fam, cliff)
    rows, C = convergence_experiment(H, [Hp], diam, _samples(torus, cfg.budgets.samples, cfg.seed), fam, cliff)
    rows[0]["n"] = 0
    diag.update({"H_min_sv": H.min_sv, "Hprime_min_sv": Hp.min_sv})
    return RESULT_COLUMNS, rows, diag


def schedule_entries(H_entries, Hp_entries, decay: float, length: int):
    """H_n = H + decay^n (H' - H) for n = 1..length, entrywise."""
    out = []
    for n in range(1, length + 1):
        c = decay**n
        out.append([[h + c * (hp - h) for h, hp in zip(rh, rhp)] for rh, rhp in zip(H_entries, Hp_entries)])
    return out


def run_converge(cfg: ExperimentConfig):
    torus, fam, cliff = _setup(cfg)
    He = build_entries(cfg.H_spec, torus, cfg.d, cfg.seed, STREAM_H)
    Hpe = build_entries(cfg.Hprime_spec, torus, cfg.d, cfg.seed, STREAM_HPRIME)
    H = assemble_H(He)
    schedule = [assemble_H(e) for e in schedule_entries(He, Hpe, cfg.schedule.decay, cfg.schedule.length)]
    diam, diag = _flat_diameter(cfg, torus, fam, cliff)
    samples = _samples(torus, cfg.budgets.samples, cfg.seed)

    def one(i):
        return convergence_experiment(H, [schedule[i]], diam, samples, fam, cliff)[0][0]

    with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
        rows = list(ex.map(one, range(len(schedule))))
    for i, row in enumerate(rows):
        row["n"] = i + 1
    tail = rows[len(rows) // 2 :]
    diag["C_length"] = max((r["closed_form_corrected"] / r["length_fn"] for r in tail if r["length_fn"] > 0), default=0.0)
    diag["C_geometric"] = max(r["closed_form_corrected"] / cfg.schedule.decay ** r["n"] for r in tail)
    col = [r["closed_form_corrected"] for r in rows]
    diag["monotone_nonincreasing"] = all(b <= a + SLACK for a, b in zip(col, col[1:]))
    if not diag["monotone_nonincreasing"]:
        raise InvariantViolation("closed_form_corrected nonincreasing along the schedule", cfg.seed, str(col))
    return RESULT_COLUMNS, rows, diag


MK_COLUMNS = ["pair", "mk_flat", "mk_H", "mk_Hprime", "oracle_H", "delta_fwd", "comparison_holds"]


def run_mk(cfg: ExperimentConfig):
    torus, fam, cliff = _setup(cfg)
    H = assemble_H(build_entries(cfg.H_spec, torus, cfg.d, cfg.seed, STREAM_H))
    Hp = assemble_H(build_entries(cfg.Hprime_spec, torus, cfg.d, cfg.seed, STREAM_HPRIME))
    D = make_dirac(torus, H, fam, cliff)
    L_flat = LipSeminorm.from_dirac(make_dirac(torus, fam=fam, cliff=cliff), "flat")
    L_H, L_Hp = LipSeminorm.from_dirac(D, "H"), LipSeminorm.from_dirac(D.with_H(Hp), "H'")
    d_fwd, _ = pairing_delta(H, Hp)
    b = cfg.budgets
    solver = dict(restarts=b.restarts, iterations=b.iterations, seed=cfg.seed, workers=cfg.workers)
    rows = []
    for i in range(b.samples):
        rng = task_rng(cfg.seed, STREAM_STATES + i)
        phi, psi = random_state(cfg.q, rng), random_state(cfg.q, rng)
        m_flat = mk_distance(L_flat, phi, psi, **solver).value
        m_H = mk_distance(L_H, phi, psi, **solver).value
        m_Hp = mk_distance(L_Hp, phi, psi, **solver).value
        oracle = mk_oracle_grid(L_H, phi, psi) if cfg.q == 2 else ""
        # L_H' <= (1 + delta_fwd) L_H, so mk_H <= (1 + delta_fwd) mk_H'
        holds = m_H <= (1 + d_fwd) * m_Hp * (1 + 1e-6) + SLACK
        rows.append(dict(pair=i, mk_flat=m_flat, mk_H=m_H, mk_Hprime=m_Hp, oracle_H=oracle, delta_fwd=d_fwd, comparison_holds=holds))
        if not holds:
            raise InvariantViolation("mk_H <= (1 + delta_fwd) mk_H'", cfg.seed, f"pair {i}")
    return MK_COLUMNS, rows, {"kernel_gap_H": kernel_gap(L_H), "kernel_gap_Hprime": kernel_gap(L_Hp)}


SANDWICH_COLUMNS = [
    "sample",
    "identity_residual",
    "lip_K",
    "lip_H",
    "ratio",
    "delta_two_factor",
    "delta_rigorous",
    "two_factor_holds",
    "rigorous_holds",
]


def run_sandwich(cfg: ExperimentConfig):
    torus, fam, cliff = _setup(cfg)
    S = cliff.spinor_dim
    K = build_spinor_commutant(cfg.H_spec, torus, S, cfg.seed, STREAM_H)
    Hs = build_spinor_commutant(cfg.Hprime_spec, torus, S, cfg.seed, STREAM_HPRIME)
    D = flat_dirac(torus, fam, cliff)
    dp, dr = sandwich_delta(Hs, K), sandwich_delta_rigorous(Hs, K)
    rows = []
    for i, a in enumerate(_samples(torus, cfg.budgets.samples, cfg.seed)):
        res = sandwich_identity_residual(K, D, a)
        lk, lh = sandwich_lip(K, D, a), sandwich_lip(Hs, D, a)
        ratio = abs(lh - lk) / lk if lk > 0 else 0.0
        row = dict(
            sample=i,
            identity_residual=res,
            lip_K=lk,
            lip_H=lh,
            ratio=ratio,
            delta_two_factor=dp,
            delta_rigorous=dr,
            two_factor_holds=abs(lh - lk) <= dp * lk + SLACK,
            rigorous_holds=abs(lh - lk) <= dr * lk + SLACK,
        )
        rows.append(row)
        if res > SLACK:
            raise InvariantViolation("[KDK, pi(a)] = K [D, pi(a)] K", cfg.seed, f"sample {i}: residual {res:.3e}")
        if not row["rigorous_holds"]:
            raise InvariantViolation("|L_H - L_K| <= delta_rigorous L_K", cfg.seed, f"sample {i}")
    diag = {"two_factor_failures": sum(not r["two_factor_holds"] for r in rows), "K_min_sv": K.min_sv, "H_min_sv": Hs.min_sv}
    return SANDWICH_COLUMNS, rows, diag


# ---------------------------------------------------------------- axioms


AXIOM_COLUMNS = ["suite", "check", "value", "threshold", "status"]


def _leibniz_wrap_witness(torus, fam):
    """First monomial pair (lexicographic) where the multiplier derivation breaks Leibniz."""
    q = torus.q
    for m1 in range(q):
        for m2 in range(q):
            a, b = weyl(torus, m1, 0), weyl(torus, m2, 0)
            r = op_norm((derivation(fam, 1, a * b) - derivation(fam, 1, a) * b - a * derivation(fam, 1, b)).matrix)
            if r > 1e-11:
                return (m1, m2), r
    return None, 0.0


def axiom_checks(cfg: ExperimentConfig) -> list[dict]:
    torus, fam, cliff = _setup(cfg)
    q, seed, count = cfg.q, cfg.seed, cfg.budgets.samples
    rows: list[dict] = []

    def record(suite, check, value, threshold, ok, status=None):
        rows.append(dict(suite=suite, check=check, value=value, threshold=threshold, status=status or ("pass" if ok else "fail")))

    def rng(i):
        return task_rng(seed, STREAM_SAMPLES + i)

    # fuzzy torus
    U, V = torus.clock, torus.shift
    r = op_norm(V @ U - torus.omega * U @ V)
    record("torus", "shift clock = omega clock shift", r, 1e-12, r <= 1e-12)
    W = torus.synthesis
    r = op_norm(W.conj().T @ W / q - identity(torus.dim))
    record("torus", "monomials tau-orthonormal", r, 1e-12, r <= 1e-12)
    worst_comm = worst_conj = 0.0
    for i in range(count):
        a, b = random_element(torus, rng(i)), random_element(torus, rng(i + count))
        Ja = modular_conj(left_regular(a), torus).matrix
        Rb = left_regular(b).matrix
        worst_comm = max(worst_comm, op_norm(Ja @ Rb - Rb @ Ja))
        worst_conj = max(worst_conj, op_norm(Ja - commutant_right(a.star()).matrix))
    record("torus", "[J rho(a) J, rho(b)] = 0", worst_comm, 1e-10, worst_comm <= 1e-10)
    record("torus", "J rho(a) J = R_{a*}", worst_conj, 1e-12, worst_conj <= 1e-12)
    a = random_element(torus, rng(0))
    r = op_norm((dual_action(1, 0, dual_action(q - 1, 0, a)) - a).matrix)
    record("torus", "dual action group law", r, 1e-12, r <= 1e-12)
    r = abs(tau(dual_action(1, 1, a)) - tau(a))
    record("torus", "dual action preserves tau", r, 1e-14, r <= 1e-14)
    worst = 0.0
    half = q / 2
    for m1 in range(q):
        for m2 in range(q):
            s1, s2 = torus.exponents[0][m1, 0], torus.exponents[0][m2, 0]
            if abs(s1) + abs(s2) < half:
                x, y = weyl(torus, m1, 0), weyl(torus, m2, 0)
                res = derivation(fam, 1, x * y) - derivation(fam, 1, x) * y - x * derivation(fam, 1, y)
                worst = max(worst, op_norm(res.matrix))
    record("torus", "Leibniz on non-wrapping monomials", worst, 1e-11, worst <= 1e-11)
    pair, r = _leibniz_wrap_witness(torus, fam)
    if pair is not None:
        record("torus", f"Leibniz wrapping witness U^{pair[0]} U^{pair[1]}", r, 1e-11, True, "violation-by-design")
    r = cliff.anticommutation_residual()
    record("torus", "Clifford anticommutation", r, 1e-12, r <= 1e-12)
    worst = 0.0
    for j in range(cliff.d):
        p, _ = cliff.projections(j)
        for k in range(cliff.d):
            target = p if j == k else 0 * p
            worst = max(worst, op_norm(p @ cliff.gammas[k] @ p - target))
    record("torus", "p_j c_k p_j = delta_jk p_j", worst, 1e-12, worst <= 1e-12)

    # dirac
    H = assemble_H(build_entries(cfg.H_spec, torus, cfg.d, seed, STREAM_H))
    D = make_dirac(torus, H, fam, cliff)
    worst = 0.0
    for g in (weyl(torus, 1, 0), weyl(torus, 0, 1)):
        R = left_regular(g).matrix
        for row in H.blocks:
            for blk in row:
                worst = max(worst, op_norm(blk @ R - R @ blk))
    record("dirac", "H blocks commute with rho(A)", worst, 1e-10, worst <= 1e-10)
    record("dirac", "H invertible (min singular value)", H.min_sv, 1e-8, H.min_sv > 1e-8)
    samples = _samples(torus, count, seed)
    worst = min(lip_norm(D, a) - compression_bound(D, a) for a in samples)
    record("dirac", "compression L_H >= max_j ||A_j||", worst, -SLACK, worst >= -SLACK)
    worst = max(abs(lip_norm(D.with_H(H.scaled(2.5)), a) - 2.5 * lip_norm(D, a)) for a in samples)
    record("dirac", "L_{cH} = c L_H", worst, 1e-12, worst <= 1e-12 * max(1.0, max(lip_norm(D, a) for a in samples)))
    worst = max(literal_formula_residual(D, a) for a in samples)
    record("dirac", "literal commutator = formula on non-wrapping columns", worst, 1e-9, worst <= 1e-9)
    band = max(0, math.ceil(q / 4) - 1)
    ds_entries = random_entries(torus, cfg.d, rng(7), 0.3, band)
    worst = max(ds_commutator_residual(ds_entries, random_element(torus, rng(100 + i), band=band, hermitian=True), fam, cliff) for i in range(min(count, 10)))
    record("dirac", "[D'_H, pi(a)] = [D_H, pi(a)]", worst, 1e-9, worst <= 1e-9)
    K = random_spinor_commutant(torus, cliff.spinor_dim, rng(8))
    Df = flat_dirac(torus, fam, cliff)
    worst = max(sandwich_identity_residual(K, Df, a) for a in samples[: min(count, 10)])
    record("dirac", "[KDK, pi(a)] = K [D, pi(a)] K", worst, 1e-9, worst <= 1e-9)

    # metric
    L = LipSeminorm.from_dirac(D, "H")
    g = kernel_gap(L)
    record("metric", "kernel gap", g, 1e-8, g > 1e-8)
    total = math.ceil(q / 2) - 1
    ba, bb = (total + 1) // 2, total // 2
    worst = math.inf
    for i in range(count):
        a = random_element(torus, rng(200 + i), band=ba, hermitian=True)
        b = random_element(torus, rng(300 + i), band=bb, hermitian=True)
        worst = min(worst, *leibniz_residual(L, a, b))
    record("metric", "Leibniz slack (Jordan and Lie)", worst, -SLACK, worst >= -SLACK)
    Hp = assemble_H(build_entries(cfg.Hprime_spec, torus, cfg.d, seed, STREAM_HPRIME))
    Dp = D.with_H(Hp)
    d_fwd, d_bwd = pairing_delta(H, Hp)
    worst = -math.inf
    for a in samples:
        l1, l2 = lip_norm(D, a), lip_norm(Dp, a)
        worst = max(worst, abs(l1 - l2) - d_fwd * l1, abs(l1 - l2) - d_bwd * l2)
    record("metric", "|L_H - L_H'| <= d ||1 - H'H^-1|| L_H", worst, SLACK, worst <= SLACK)
    b = cfg.budgets
    solver = dict(restarts=min(b.restarts, 16), iterations=min(b.iterations, 150), seed=seed)
    r0 = rng(400)
    states = [random_state(q, r0) for _ in range(3)]
    m01 = mk_distance(L, states[0], states[1], **solver).value
    m10 = mk_distance(L, states[1], states[0], **solver).value
    m12 = mk_distance(L, states[1], states[2], **solver).value
    m02 = mk_distance(L, states[0], states[2], **solver).value
    record("metric", "mk symmetry", abs(m01 - m10), 1e-6, abs(m01 - m10) <= 1e-6 * max(1, m01))
    tri = m02 - m01 - m12
    record("metric", "mk triangle inequality", tri, 2e-6, tri <= 2e-6 * max(1, m02))
    return rows


def run_axioms(cfg: ExperimentConfig):
    rows = axiom_checks(cfg)
    counts = {s: sum(r["status"] == s for r in rows) for s in ("pass", "fail", "violation-by-design")}
    failed = [r["check"] for r in rows if r["status"] == "fail"]
    diag = {"counts": counts, "failed": failed}
    return AXIOM_COLUMNS, rows, diag


RUNNERS = {"axioms": run_axioms, "bound": run_bound, "converge": run_converge, "mk": run_mk, "sandwich": run_sandwich}


def run(cfg: ExperimentConfig, quiet: bool = True) -> int:
    """Run one mode, write ``<out>/<mode>.csv`` and its manifest; return the exit code."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    status, error = EXIT_OK, None
    columns, rows, diag = [], [], {}
    try:
        columns, rows, diag = RUNNERS[cfg.mode](cfg)
        if cfg.mode in ("bound", "converge"):
            for row in rows:
                _check_row(row, cfg.seed)
        if cfg.mode == "axioms" and diag["failed"]:
            raise InvariantViolation(", ".join(diag["failed"]), cfg.seed, "axiom suite failures")
    except InvariantViolation as exc:
        status, error = EXIT_INVARIANT, str(exc)
    except ConfigError as exc:
        status, error = EXIT_CONFIG, str(exc)
    wall_ms = (time.perf_counter() - t0) * 1e3
    if rows:
        write_csv(out / f"{cfg.mode}.csv", columns, rows)
    manifest = {
        "config": config_to_dict(cfg),
        "version": __version__,
        "mode": cfg.mode,
        "status": status,
        "error": error,
        "wall_time_ms": wall_ms,
        "rows": len(rows),
        "diagnostics": diag,
    }
    (out / f"{cfg.mode}.json").write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    if not quiet:
        print(f"{cfg.mode}: {len(rows)} rows -> {out / (cfg.mode + '.csv')} ({wall_ms:.0f} ms)")
        if cfg.mode == "axioms":
            print("  " + ", ".join(f"{k}: {v}" for k, v in diag["counts"].items()))
    if error:
        print(error, file=sys.stderr)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvedtori",
        description="Lip-norm, Monge-Kantorovich and propinquity-bound experiments on fuzzy tori.",
        epilog=DEFAULTS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("verb", choices=[*MODES, "check-all"])
    parser.add_argument("--config", type=Path, help="JSON config file (see keys below)")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--out", help="override the output directory")
    parser.add_argument("--restarts", type=int, help="override budgets.restarts")
    parser.add_argument("--workers", type=int, help="override the worker count")
    parser.add_argument("--quiet", action="store_true", help="print nothing on success")
    return parser


def load_config(args) -> ExperimentConfig:
    text = args.config.read_text(encoding="utf-8") if args.config else "{}"
    data = json.loads(text) if text.strip() else {}
    if not isinstance(data, dict):
        raise ConfigError(["<root>: expected a JSON object"])
    overrides = {"seed": args.seed, "out": args.out, "workers": args.workers}
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if args.restarts is not None:
        data.setdefault("budgets", {})
        if isinstance(data["budgets"], dict):
            data["budgets"]["restarts"] = args.restarts
    if args.verb != "check-all":
        data["mode"] = args.verb
    return parse_config(json.dumps(data))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        cfg = load_config(args)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        errors = exc.errors if isinstance(exc, ConfigError) else [str(exc)]
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.verb != "check-all":
        return run(cfg, quiet=args.quiet)
    worst = EXIT_OK
    for mode in MODES:
        worst = max(worst, run(cfg.replace(mode=mode), quiet=args.quiet))
    return worst


if __name__ == "__main__":
    sys.exit(main())
