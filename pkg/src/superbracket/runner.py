"""Suite runner and report emitters.

Each enabled check produces one or more independent ReportRecords; check
errors are captured into the record rather than aborting the suite.  With a
fixed seed the records (minus wall-clock timing) are bit-reproducible, and
the canonical JSON output therefore omits the elapsed-time field unless
timing is requested explicitly.
"""
from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from .algebra import (
    AlgebraParams,
    DMinusOne,
    DPlusOne,
    DZero,
    Gen,
    LeftSeparable,
    Ratio,
    RightSeparable,
    build_algebra,
    jacobi_check,
)
from .coproducts import (
    CENTRAL_GENS,
    build_coproduct,
    cocommutativity_check,
    homomorphism_check,
    short_rep_reduction_check,
)
from .errors import SuperbracketError
from .families import classify_family, cross_jacobian_report, product_constraint_check
from .representations import (
    boost_commutator_zero,
    build_representation,
    ode_solution_check,
    shortening_identities,
    transformed_representation,
    verify_relations,
)
from .sampling import Sampler
from .suite import CheckInvocation, CheckSuiteConfig
from .symbolic import short_rep_reduction_symbolic, tail_cancellation_check

SCHEMA_VERSION = 1


@dataclass
class ReportRecord:
    check: str
    status: str  # pass | fail | expected-fail | vacuous
    max_residual: float
    worst_point: Optional[dict]
    samples: int
    seed: int
    elapsed_ms: float
    note: str = ""


CHECK_DESCRIPTIONS: Dict[str, str] = {
    "jacobi": (
        "Evaluates the graded Jacobi identity over all admissible generator "
        "triples of the family's bracket table at seeded momentum samples, "
        "with the boost acting on coefficients as a convective derivation."
    ),
    "classify": (
        "Round-trips the family's cross-handed Jacobian pair through the "
        "classifier and evaluates the two-boost consistency residuals and "
        "the product constraints on d_LR d_RL."
    ),
    "boost_commutator": (
        "Builds the differential representation and verifies that all "
        "coefficient matrices of [J_L, J_R] vanish; the derivative "
        "coefficient is reported for inspection against the Jacobian flow "
        "equation."
    ),
    "relations": (
        "Verifies every representable bracket-table row against the "
        "differential-operator images, including rows required to vanish."
    ),
    "ode": (
        "Checks that the arccot momentum map solves "
        "dp_R/dp_L = gamma csc(p_L/2) sin(p_R/2) and that the pulled-back "
        "right energy matches its closed form."
    ),
    "shortening": (
        "Verifies the two eta-parameterised anticommutator identities of the "
        "hatted supercharges for randomly sampled mixing parameters."
    ),
    "coproduct_hom": (
        "Verifies tensor_bracket(Delta x, Delta y) = Delta z for every "
        "bracket-table row on the short representation, retrying the "
        "discrete tail sign conventions if a tail-dependent row fails."
    ),
    "cocommutativity": (
        "Checks invariance of the central elements' coproducts under the "
        "graded flip; the fermionic coproduct is included as an "
        "expected-fail fixture."
    ),
    "tail_cancellation": (
        "Exact symbolic verification that the boost-coproduct tails commute "
        "with the opposite-handed fermion coproducts and that their "
        "outer-automorphism terms annihilate the same-handed ones."
    ),
    "short_reduction": (
        "Verifies, exactly and numerically, that on the short representation "
        "the full boost-coproduct tail reduces to the fermion-bilinear form "
        "in all commutators with the fermion coproducts."
    ),
}


def _family_tag(cfg: CheckSuiteConfig):
    zeta = cfg.family_arg("zeta")
    return {
        "d_zero": lambda: DZero(),
        "d_plus_one": lambda: DPlusOne(),
        "d_minus_one": lambda: DMinusOne(),
        "ratio": lambda: Ratio(zeta),
        "left_separable": lambda: LeftSeparable(zeta),
        "right_separable": lambda: RightSeparable(zeta),
    }[cfg.family]()


def _params(cfg: CheckSuiteConfig) -> AlgebraParams:
    return AlgebraParams(
        h_L=cfg.dispersion_arg("hL", 1.0),
        h_R=cfg.dispersion_arg("hR", 1.0),
        dispersion=cfg.dispersion,
        mass=cfg.dispersion_arg("m", 0.0),
        kappa=cfg.family_arg("kappa", 1.0),
    )


def _sampler(cfg: CheckSuiteConfig, seed_override: Optional[int]) -> Sampler:
    s = cfg.sampling
    return Sampler(
        seed=s.seed if seed_override is None else seed_override,
        count=s.points,
        domain=s.domain,
        tolerance=s.tol,
    )


class _SuiteContext:
    """Shared lazily-built objects for one suite run."""

    def __init__(self, cfg: CheckSuiteConfig, seed_override: Optional[int]):
        self.cfg = cfg
        self.family = _family_tag(cfg)
        self.params = _params(cfg)
        self.sampler = _sampler(cfg, seed_override)
        self._spec = None
        self._rep = None

    @property
    def spec(self):
        if self._spec is None:
            self._spec = build_algebra(self.family, self.params)
        return self._spec

    @property
    def separable(self) -> bool:
        return isinstance(self.family, (LeftSeparable, RightSeparable))

    def representation(self, eta=None):
        if self._rep is None:
            eta = self.cfg.eta if eta is None else eta
            if self.separable:
                base = build_representation(DZero(), self.params, eta=eta)
                self._rep = transformed_representation(base, self.family)
            else:
                self._rep = build_representation(
                    self.family, self.params, eta=eta, spec=None if self.separable else self.spec
                )
        return self._rep


def _record_from_report(name: str, report, seed: int, samples: int, elapsed: float,
                        note: str = "") -> ReportRecord:
    if getattr(report, "vacuous", False):
        status = "vacuous"
    else:
        status = "pass" if report.passed else "fail"
    worst = report.worst
    return ReportRecord(
        check=name,
        status=status,
        max_residual=report.max_residual,
        worst_point=worst.worst_point if worst else None,
        samples=samples,
        seed=seed,
        elapsed_ms=elapsed,
        note=note or getattr(report, "note", "") or "",
    )


def _run_jacobi(ctx: _SuiteContext) -> List[ReportRecord]:
    t0 = time.monotonic()
    report = jacobi_check(ctx.spec, ctx.sampler)
    return [_record_from_report("jacobi", report, ctx.sampler.seed, ctx.sampler.count,
                                (time.monotonic() - t0) * 1000.0)]


def _run_classify(ctx: _SuiteContext) -> List[ReportRecord]:
    t0 = time.monotonic()
    spec = ctx.spec
    tag = classify_family(spec.dLR, spec.dRL, spec, ctx.sampler)
    roundtrip_ok = repr(tag) == repr(ctx.family)
    cross = cross_jacobian_report(spec, ctx.sampler)
    product = product_constraint_check(spec, ctx.sampler)
    passed = roundtrip_ok and cross.passed and product.passed
    worst = max([c for c in cross.conditions + product.conditions],
                key=lambda c: c.max_residual, default=None)
    note = f"classified as {tag!r}"
    if not roundtrip_ok:
        note += f" (expected {ctx.family!r})"
    return [ReportRecord(
        check="classify",
        status="pass" if passed else "fail",
        max_residual=worst.max_residual if worst else 0.0,
        worst_point=worst.worst_point if worst else None,
        samples=ctx.sampler.count,
        seed=ctx.sampler.seed,
        elapsed_ms=(time.monotonic() - t0) * 1000.0,
        note=note,
    )]


def _run_boost_commutator(ctx: _SuiteContext) -> List[ReportRecord]:
    t0 = time.monotonic()
    report = boost_commutator_zero(ctx.representation(), ctx.sampler)
    return [_record_from_report("boost_commutator", report, ctx.sampler.seed,
                                ctx.sampler.count, (time.monotonic() - t0) * 1000.0)]


def _run_relations(ctx: _SuiteContext) -> List[ReportRecord]:
    t0 = time.monotonic()
    report = verify_relations(ctx.representation(), ctx.spec, ctx.sampler)
    return [_record_from_report("relations", report, ctx.sampler.seed, ctx.sampler.count,
                                (time.monotonic() - t0) * 1000.0)]


def _run_ode(ctx: _SuiteContext, inv: CheckInvocation) -> List[ReportRecord]:
    t0 = time.monotonic()
    report = ode_solution_check(inv.arg("kappa"), inv.arg("gamma"), ctx.sampler)
    return [_record_from_report("ode", report, ctx.sampler.seed, ctx.sampler.count,
                                (time.monotonic() - t0) * 1000.0)]


def _run_shortening(ctx: _SuiteContext) -> List[ReportRecord]:
    t0 = time.monotonic()
    rep = ctx.representation()
    rng = np.random.default_rng(ctx.sampler.seed)
    worst = 0.0
    worst_pt = None
    for _ in range(20):
        x = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        y = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        report = shortening_identities(rep, x, y, ctx.sampler)
        if report.max_residual > worst:
            worst = report.max_residual
            worst_pt = {"x": x, "y": y}
    tol = max(ctx.sampler.tolerance, 1e-13)
    return [ReportRecord(
        check="shortening",
        status="pass" if worst <= tol else "fail",
        max_residual=worst,
        worst_point=worst_pt,
        samples=20,
        seed=ctx.sampler.seed,
        elapsed_ms=(time.monotonic() - t0) * 1000.0,
        note=f"eta={ctx.cfg.eta}",
    )]


def _run_coproduct_hom(ctx: _SuiteContext) -> List[ReportRecord]:
    t0 = time.monotonic()
    rep = ctx.representation()
    delta = build_coproduct(ctx.spec, ctx.cfg.braiding, rep)
    report = homomorphism_check(delta, ctx.spec, rep, ctx.sampler)
    return [_record_from_report("coproduct_hom", report, ctx.sampler.seed,
                                ctx.sampler.count, (time.monotonic() - t0) * 1000.0)]


def _run_cocommutativity(ctx: _SuiteContext) -> List[ReportRecord]:
    t0 = time.monotonic()
    rep = ctx.representation()
    delta = build_coproduct(ctx.spec, ctx.cfg.braiding, rep)
    worst = 0.0
    worst_pt = None
    ok = True
    for g in CENTRAL_GENS:
        report = cocommutativity_check(delta, g, ctx.sampler)
        ok = ok and report.passed
        if report.max_residual > worst:
            worst = report.max_residual
            worst_pt = report.worst.worst_point if report.worst else None
    records = [ReportRecord(
        check="cocommutativity",
        status="pass" if ok else "fail",
        max_residual=worst,
        worst_point=worst_pt,
        samples=ctx.sampler.count,
        seed=ctx.sampler.seed,
        elapsed_ms=(time.monotonic() - t0) * 1000.0,
        note="all central elements",
    )]
    t0 = time.monotonic()
    fixture = cocommutativity_check(delta, Gen.Q_L, ctx.sampler, expected_fail=True)
    records.append(ReportRecord(
        check="cocommutativity_fermion_fixture",
        status="expected-fail" if not fixture.passed else "fail",
        max_residual=fixture.max_residual,
        worst_point=fixture.worst.worst_point if fixture.worst else None,
        samples=ctx.sampler.count,
        seed=ctx.sampler.seed,
        elapsed_ms=(time.monotonic() - t0) * 1000.0,
        note="the fermionic coproduct must not be cocommutative",
    ))
    return records


def _run_tail_cancellation(ctx: _SuiteContext) -> List[ReportRecord]:
    t0 = time.monotonic()
    report = tail_cancellation_check(ctx.spec, ctx.cfg.braiding)
    failures = report.failures()
    return [ReportRecord(
        check="tail_cancellation",
        status="pass" if report.passed else "fail",
        max_residual=float(len(failures)),
        worst_point=None,
        samples=0,
        seed=ctx.sampler.seed,
        elapsed_ms=(time.monotonic() - t0) * 1000.0,
        note="exact symbolic check; residual counts failed identities",
    )]


def _run_short_reduction(ctx: _SuiteContext) -> List[ReportRecord]:
    t0 = time.monotonic()
    symbolic = short_rep_reduction_symbolic(ctx.spec)
    rep = ctx.representation()
    numeric = short_rep_reduction_check(ctx.spec, rep, ctx.sampler)
    passed = symbolic.passed and numeric.passed
    return [ReportRecord(
        check="short_reduction",
        status="pass" if passed else "fail",
        max_residual=numeric.max_residual,
        worst_point=None,
        samples=ctx.sampler.count,
        seed=ctx.sampler.seed,
        elapsed_ms=(time.monotonic() - t0) * 1000.0,
        note=("exact symbolically; numeric residual shown"
              if symbolic.passed else "symbolic reduction failed"),
    )]


_RUNNERS: Dict[str, Callable] = {
    "jacobi": _run_jacobi,
    "classify": _run_classify,
    "boost_commutator": _run_boost_commutator,
    "relations": _run_relations,
    "shortening": _run_shortening,
    "coproduct_hom": _run_coproduct_hom,
    "cocommutativity": _run_cocommutativity,
    "tail_cancellation": _run_tail_cancellation,
    "short_reduction": _run_short_reduction,
}


def run_suite(cfg: CheckSuiteConfig, seed_override: Optional[int] = None) -> List[ReportRecord]:
    """Execute the enabled checks in declared order.

    Individual check errors are captured into their record; the suite always
    runs to completion.
    """
    ctx = _SuiteContext(cfg, seed_override)
    records: List[ReportRecord] = []
    for inv in cfg.checks:
        t0 = time.monotonic()
        try:
            if inv.name == "ode":
                records.extend(_run_ode(ctx, inv))
            else:
                records.extend(_RUNNERS[inv.name](ctx))
        except SuperbracketError as err:
            records.append(ReportRecord(
                check=inv.name,
                status="fail",
                max_residual=float("nan"),
                worst_point=None,
                samples=ctx.sampler.count,
                seed=ctx.sampler.seed,
                elapsed_ms=(time.monotonic() - t0) * 1000.0,
                note=f"{type(err).__name__}: {err}",
            ))
    return records


def suite_failed(records: List[ReportRecord]) -> bool:
    return any(r.status == "fail" for r in records)


# --------------------------------------------------------------------------
# Emitters
# --------------------------------------------------------------------------

def _point_to_json(point: Optional[dict]):
    if point is None:
        return None
    out = {}
    for k, v in point.items():
        c = complex(v)
        out[str(k)] = [c.real, c.imag]
    return out


def emit_report(records: List[ReportRecord], format: str = "json",
                include_timing: bool = False) -> bytes:
    """Serialise records; JSON is byte-stable for a fixed seed.

    Wall-clock timing is excluded from the canonical JSON (it would break
    reproducibility); request it explicitly with include_timing.
    """
    if format == "json":
        payload = {"schema_version": SCHEMA_VERSION, "records": []}
        for r in records:
            rec = {
                "check": r.check,
                "status": r.status,
                "max_residual": None if r.max_residual != r.max_residual else r.max_residual,
                "worst_point": _point_to_json(r.worst_point),
                "samples": r.samples,
                "seed": r.seed,
                "note": r.note,
            }
            if include_timing:
                rec["elapsed_ms"] = r.elapsed_ms
            payload["records"].append(rec)
        return (json.dumps(payload, indent=2, sort_keys=False) + "\n").encode()
    if format == "text":
        buf = io.StringIO()
        header = f"{'check':34s} {'status':14s} {'max residual':>13s} {'samples':>8s} {'seed':>6s} {'ms':>8s}"
        buf.write(header + "\n")
        buf.write("-" * len(header) + "\n")
        for r in records:
            res = "-" if r.max_residual != r.max_residual else f"{r.max_residual:.3e}"
            buf.write(
                f"{r.check:34s} {r.status:14s} {res:>13s} {r.samples:>8d} "
                f"{r.seed:>6d} {r.elapsed_ms:>8.1f}"
            )
            if r.note:
                buf.write(f"   # {r.note}")
            buf.write("\n")
        return buf.getvalue().encode()
    raise ValueError(f"unknown report format {format!r}")
