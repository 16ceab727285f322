"""Named checks behind scenario files and the built-in acceptance battery.

Random instances are drawn from the scenario's own ``seed``; only Monte-Carlo
checks (``stochastic=True``) accept a seed override. A check takes
``(payload, tol, seed)`` and returns a :class:`CheckResult`:
named residuals, each compared against its effective tolerance, plus
optional numeric arrays for CSV dumps. Tolerances come from the check's
defaults, overridden by the scenario's ``tolerances`` object.
"""

import json
import operator
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import dilation, freefield, hyp, kernels, kms, ospaths, rphs, sphere
from .errors import OskitError
from .linalg import hermitian_residual, psd_verdict
from .measures import SpectralMeasure

MODULES = ("rphs", "kernels", "dilation", "kms", "sphere", "freefield", "ospaths")

RELATIONS = {"<=": operator.le, "<": operator.lt, ">=": operator.ge, ">": operator.gt}


@dataclass
class Residual:
    name: str
    value: float
    tolerance: float
    relation: str = "<="

    @property
    def passed(self):
        return bool(RELATIONS[self.relation](self.value, self.tolerance))


@dataclass
class CheckResult:
    residuals: list
    provenance: list
    dumps: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    module: str
    func: object
    defaults: dict
    stochastic: bool = False
    schema: dict = field(default_factory=dict)


REGISTRY = {}


def register(name, module, defaults, stochastic=False, schema=None):
    def wrap(func):
        REGISTRY[name] = Check(module, func, dict(defaults), stochastic, schema or {})
        return func

    return wrap


def psd_residuals(prefix, report, tol, expect_not_psd=False, neg_margin=None):
    """Residuals expressing a PSD (or NOT_PSD) expectation for a Gram report."""
    scale = max(abs(report.max_eig), 1.0)
    if expect_not_psd:
        bound = -tol * scale if neg_margin is None else -neg_margin
        return [Residual(f"{prefix}.min_eig", report.min_eig, bound, "<")]
    return [Residual(f"{prefix}.min_eig", report.min_eig, -tol * scale, ">=")]


# kernels -----------------------------------------------------------------------


def _points(grid):
    if isinstance(grid, dict):
        if "uniform" in grid:
            lo, hi, n = grid["uniform"]
            return np.linspace(lo, hi, int(n))
        if "chebyshev" in grid:
            lo, hi, n = grid["chebyshev"]
            return kernels.chebyshev_nodes(lo, hi, int(n))
        raise OskitError("SCHEMA_ERROR", "point grid needs 'uniform' or 'chebyshev'")
    return np.asarray(grid, dtype=float)


@register(
    "kernel_gram",
    "kernels",
    {"psd": 1e-10},
    schema={"required": ["family", "params", "points"]},
)
def kernel_gram(payload, tol, seed):
    spec = kernels.KernelSpec(payload["family"], payload["params"])
    pts = _points(payload["points"])
    if "geometry" in payload:
        geo = kernels.ReflectionGeometry(payload["geometry"], payload.get("geometry_param"))
        g = kernels.reflected_gram(spec, geo, pts)
    else:
        g = kernels.gram(spec, pts)
    report, eigs = psd_verdict(g, tol["psd"], return_eigs=True)
    return CheckResult(
        psd_residuals("gram", report, tol["psd"], payload.get("expect_not_psd", False)),
        ["oskit.kernels.gram", "oskit.linalg.psd_verdict"],
        {"eigenvalues": eigs},
    )


@register("euclidean_green", "kernels", {"psd": 1e-10, "rank": 1e-10}, schema={"required": ["lambdas"]})
def euclidean_green(payload, tol, seed):
    lo, hi, n = payload.get("interval", [-10.0, 10.0, 64])
    pts = np.linspace(lo, hi, int(n))
    plus = pts[pts > 0]
    res, dumps = [], {}
    for lam in payload["lambdas"]:
        spec = kernels.exp_line(lam)
        report, eigs = psd_verdict(kernels.gram(spec, pts), tol["psd"], return_eigs=True)
        res += psd_residuals(f"lam={lam}.group", report, tol["psd"])
        sv = np.linalg.svd(kernels.reflected_gram(spec, kernels.ReflectionGeometry("LINE"), plus), compute_uv=False)
        res.append(Residual(f"lam={lam}.reflected_sv2_over_sv1", sv[1] / sv[0], tol["rank"]))
        refl = psd_verdict(kernels.reflected_gram(spec, kernels.ReflectionGeometry("LINE"), plus), tol["psd"])
        res += psd_residuals(f"lam={lam}.reflected", refl, tol["psd"])
        dumps[f"eigenvalues_lam{lam}"] = eigs
    return CheckResult(res, ["oskit.kernels.gram", "oskit.kernels.reflected_gram"], dumps)


@register("periodic_fourier", "kernels", {"rel": 1e-8}, schema={"required": ["lambdas", "betas", "n_max"]})
def periodic_fourier(payload, tol, seed):
    res, dumps = [], {}
    for lam in payload["lambdas"]:
        for beta in payload["betas"]:
            out = kernels.periodic_fourier_coefficients(lam, beta, payload["n_max"])
            tag = f"lam={lam},beta={beta}"
            res.append(Residual(f"{tag}.max_rel_error", out["max_rel_error"], tol["rel"]))
            res.append(Residual(f"{tag}.min_coefficient", out["min_coefficient"], 0.0, ">="))
            dumps[f"coefficients_lam{lam}_beta{beta}"] = np.column_stack([out["n"], out["closed_form"], out["quadrature"].real])
    return CheckResult(res, ["oskit.kernels.periodic_fourier_coefficients"], dumps)


@register("widder", "kernels", {"psd": 1e-8, "negative": 1e-6}, schema={"required": ["lam", "beta"]})
def widder(payload, tol, seed):
    lam, beta = payload["lam"], payload["beta"]
    grid = payload.get("grid_size", 24)
    res = []
    cases = {
        "delta": (SpectralMeasure(((lam, 1.0),), "real"), payload.get("a", 1.0)),
        "periodic_pair": (SpectralMeasure(((lam, 1.0), (-lam, np.exp(-lam * beta))), "real"), beta / 2),
    }
    for tag, (mu, a) in cases.items():
        out = kernels.interval_rp_check(mu, a, grid, tol["psd"])
        res += psd_residuals(f"{tag}.group", out["group_kernel"], tol["psd"])
        res += psd_residuals(f"{tag}.semigroup", out["semigroup_kernel"], tol["psd"])
    neg = kernels.interval_rp_check(SpectralMeasure(((-1.0, 1.0),), "real"), payload.get("negative_a", 2.0), grid, tol["psd"])
    res.append(Residual("delta_minus1.group.min_eig", neg["group_kernel"].min_eig, -tol["negative"], "<"))
    return CheckResult(res, ["oskit.kernels.interval_rp_check"])


# rphs --------------------------------------------------------------------------


def _random_graph_space(rng, max_dim=4, p_one=0.2):
    p, m = (int(v) for v in rng.integers(1, max_dim + 1, 2))
    sv = rng.uniform(0.0, 1.0, min(p, m))
    sv[rng.random(len(sv)) < 0.3] = 0.0
    sv[rng.random(len(sv)) < p_one] = 1.0
    return rphs.graph_space(rng, p, m, sv)


@register("os_transform", "rphs", {"norm": 1e-10, "involution": 1e-9})
def os_transform_check(payload, tol, seed):
    rng = np.random.default_rng(seed)
    excess = 0.0
    for _ in range(payload.get("spaces", 200)):
        space, _, _ = _random_graph_space(rng)
        s = rphs.random_theta_symmetric(rng, space)
        hat = rphs.os_transform(space, rphs.os_quotient(space), s)
        if hat.size:
            excess = max(excess, np.linalg.norm(hat, 2) - rphs.restricted_norm(space, s))
    square = 0.0
    for _ in range(payload.get("unitaries", 50)):
        space, u = rphs.twisted_unitary_model(rng, int(rng.integers(1, 4)), int(rng.integers(0, 3)))
        hat = rphs.os_transform(space, rphs.os_quotient(space), rphs.coordinates(space, u @ space.plus_basis))
        square = max(square, float(np.max(np.abs(hat @ hat - np.eye(len(hat))))))
    return CheckResult(
        [Residual("norm_excess", float(excess), tol["norm"]), Residual("unitary_square_residual", square, tol["involution"])],
        ["oskit.rphs.os_quotient", "oskit.rphs.os_transform", "oskit.rphs.restricted_norm"],
    )


@register("markov_equivalence", "rphs", {"markov": 1e-9})
def markov_equivalence(payload, tol, seed):
    rng = np.random.default_rng(seed)
    disagree, markov = 0, 0
    n = payload.get("instances", 100)
    for _ in range(n):
        space, ker, _ = _random_graph_space(rng, p_one=0.3)
        out = rphs.markov_check(space, ker, tol["markov"])
        disagree += not out.criteria_agree
        markov += out.is_markov
    return CheckResult(
        [
            Residual("disagreements", float(disagree), 0.0),
            Residual("markov_instances", float(markov), 1.0, ">="),
            Residual("non_markov_instances", float(n - markov), 1.0, ">="),
        ],
        ["oskit.rphs.markov_check"],
    )


# dilation ----------------------------------------------------------------------


@register("hardy", "dilation", {"rel": 1e-6, "psd": 1e-9}, schema={"required": ["eigs"]})
def hardy(payload, tol, seed):
    rng = np.random.default_rng(seed)
    sg = dilation.HermitianSemigroup(payload["eigs"])
    k = len(sg.generator_eigs)
    pts = rng.uniform(0.2, 3.0, 5) + 1j * rng.uniform(-3.0, 3.0, 5)
    vecs = rng.normal(size=(5, k)) + 1j * rng.normal(size=(5, k))
    worst = 0.0
    for i in range(5):
        j = (i + 1) % 5
        out = dilation.hardy_twisted_inner(sg, pts[i], pts[j], vecs[i], vecs[j])
        worst = max(worst, out["rel_discrepancy"])
    g, report = dilation.hardy_gram(sg, pts, vecs, tol["psd"])
    return CheckResult(
        [Residual("max_rel_discrepancy", worst, tol["rel"])] + psd_residuals("twisted_gram", report, tol["psd"]),
        ["oskit.dilation.hardy_twisted_inner", "oskit.dilation.hardy_gram"],
    )


@register("fixed_point", "dilation", {"cesaro": 1e-2}, schema={"required": ["atoms", "T"]})
def fixed_point(payload, tol, seed):
    model = dilation.spectral_projection_model(SpectralMeasure(tuple(map(tuple, payload["atoms"]))), (payload["T"],))
    row = model["cesaro"][0]
    return CheckResult(
        [
            Residual("cesaro_minus_limit", abs(row["closed_form"] - model["ergodic_limit"]), tol["cesaro"]),
            Residual("quadrature_minus_limit", abs(row["quadrature"] - model["ergodic_limit"]), tol["cesaro"]),
        ],
        ["oskit.dilation.spectral_projection_model"],
    )


# kms ---------------------------------------------------------------------------


@register("kms", "kms", {"kms": 1e-12, "psd": 1e-8}, schema={"required": ["beta", "mus"]})
def kms_check(payload, tol, seed):
    rng = np.random.default_rng(seed)
    beta = payload["beta"]
    worst = 0.0
    for _ in range(payload.get("measures", 5)):
        atoms = []
        for _ in range(3):
            w = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            atoms.append((rng.uniform(0.0, 3.0), w @ w.conj().T))
        mu = kms.KMSMeasure(beta, tuple(atoms))
        worst = max(worst, kms.kms_residual(mu, rng.uniform(-5.0, 5.0, 32)))
    res = [Residual("kms_residual", worst, tol["kms"])]
    grid = np.linspace(0.0, beta / 2, payload.get("grid", 16))
    for m in payload["mus"]:
        model = kms.rotation_contraction(m)
        out = kms.rp_extension_check(model, beta, grid, tol=tol["psd"])
        res += psd_residuals(f"mu={m}.reflected", out["reflected_pd"], tol["psd"])
        res += psd_residuals(f"mu={m}.group", out["group_pd"], tol["psd"])
        neg = kms.rp_extension_check(model, beta, grid, tol=tol["psd"], flip_identity=True)
        res += psd_residuals(f"mu={m}.flipped.group", neg["group_pd"], tol["psd"], expect_not_psd=True)
    return CheckResult(res, ["oskit.kms.kms_residual", "oskit.kms.rp_extension_check"])


@register("matsubara", "kms", {"fft": 1e-6}, schema={"required": ["lam", "beta", "n_max"]})
def matsubara(payload, tol, seed):
    out = kms.matsubara(payload["lam"], payload["beta"], payload["n_max"], payload.get("samples", 4096))
    return CheckResult(
        [
            Residual("fft_check", out["fft_check"], tol["fft"]),
            Residual("parity_leak", out["parity_leak"], tol["fft"]),
        ],
        ["oskit.kms.matsubara"],
        {"coefficients": np.column_stack([out["n"], out["c_n"]])},
    )


# sphere ------------------------------------------------------------------------


def dual_path_error(params, xs):
    worst = 0.0
    for a, b, c in params:
        for x in xs:
            v1, v2 = hyp.hyp2f1(a, b, c, x), hyp.hyp2f1_alternative(a, b, c, x)
            worst = max(worst, abs(v1 - v2) / max(abs(v1), 1e-300))
    return worst


DUAL_PATH_PARAMS = [
    (0.5, 1.5, 2.0),
    (1.3, -0.4, 2.7),
    (0.25, 0.75, 1.5),
    sphere.psi_parameters(0.5, 2),
    sphere.psi_parameters(2.0, 2),
    sphere.psi_parameters(1.0, 3),
]


@register("hyp_window", "sphere", {"dual": 1e-10, "psd": 1e-8}, schema={"required": ["psd_cases", "not_psd_cases"]})
def hyp_window(payload, tol, seed):
    xs = np.linspace(-5.0, 0.95, payload.get("samples", 120))[:-1] + 1e-3
    res = [Residual("dual_path_rel", dual_path_error(DUAL_PATH_PARAMS, xs), tol["dual"])]
    dumps = {}
    for expect_not, cases in ((False, payload["psd_cases"]), (True, payload["not_psd_cases"])):
        for n, lam in cases:
            g = sphere.r_lambda_gram(sphere.ball_points(n, payload.get("points", 40)), lam, n)
            report, eigs = psd_verdict(g, tol["psd"], return_eigs=True)
            res += psd_residuals(f"R(n={n},lam={lam})", report, tol["psd"], expect_not)
            dumps[f"eigenvalues_n{n}_lam{lam}"] = eigs
    return CheckResult(res, ["oskit.hyp.hyp2f1", "oskit.hyp.hyp2f1_alternative", "oskit.sphere.r_lambda_gram"], dumps)


@register("r_lambda", "sphere", {"psd": 1e-8}, schema={"required": ["n", "lam"]})
def r_lambda(payload, tol, seed):
    n, lam = payload["n"], payload["lam"]
    g = sphere.r_lambda_gram(sphere.ball_points(n, payload.get("points", 40)), lam, n, payload.get("variant", "factor2"))
    report, eigs = psd_verdict(g, tol["psd"], return_eigs=True)
    return CheckResult(
        psd_residuals("gram", report, tol["psd"], payload.get("expect_not_psd", False)),
        ["oskit.sphere.r_lambda_gram"],
        {"eigenvalues": eigs},
    )


@register("psi_kernel", "sphere", {"herm": 1e-12, "psd": 1e-7, "const": 1e-8, "dup": 1e-12}, schema={"required": ["cases"]})
def psi_kernel(payload, tol, seed):
    res = []
    for n, m in payload["cases"]:
        g = sphere.psi_gram(m, n, sphere.half_sphere_points(n, payload.get("points", 30)))
        res.append(Residual(f"Psi(n={n},m={m}).hermiticity", hermitian_residual(g), tol["herm"]))
        res += psd_residuals(f"Psi(n={n},m={m})", psd_verdict(g, tol["psd"], herm_tol=tol["herm"]), tol["psd"])
    dup = 0.0
    for n in payload.get("const_n", [2, 3]):
        for lam in payload.get("const_lambda", [0.3, 0.7]):
            out = sphere.sphere_constants(lam, n)
            res.append(Residual(f"d(lam={lam},n={n}).rel_error", out["d_rel_error"], tol["const"]))
            dup = max(dup, out["duplication_residual"])
    res.append(Residual("gamma_duplication", dup, tol["dup"]))
    return CheckResult(res, ["oskit.sphere.psi_gram", "oskit.sphere.sphere_constants"])


# freefield ---------------------------------------------------------------------


@register(
    "free_field",
    "freefield",
    {"theta_t": 1e-7, "ode": 1e-6, "psd": 1e-8, "slope": 1e-3, "mult": 1e-12, "mult_fail": 1e-3},
)
def free_field(payload, tol, seed):
    rng = np.random.default_rng(seed)
    single = freefield.MassMeasure.atomic((1.0, 1.0))
    pair = freefield.MassMeasure.atomic((1.0, 1.0), (2.0, 1.0))
    res = [
        Residual(
            "theta_t_vs_quadrature",
            max(freefield.theta_t_check(r, [0.0, 0.3, 1.0, 2.5], [0.0, 0.7, [0.3, 1.2]]) for r in (single, pair)),
            tol["theta_t"],
        ),
        Residual("ode_residual", max(freefield.ode_residual(m, np.r_[np.linspace(-5, -0.1, 25), np.linspace(0.1, 5, 25)]) for m in (1.0, 2.5)), tol["ode"]),
    ]
    for d in (1, 3):
        for tag, rho in (("delta1", single), ("delta1+delta2", pair)):
            report = freefield.halfspace_rp_check(rho, d, freefield.halfspace_samples(rng, d, 32), tol["psd"])
            res += psd_residuals(f"halfspace(d={d},{tag})", report, tol["psd"])
    for s, d in ((1.0, 3), (0.5, 3), (1.5, 1)):
        out = freefield.power_law_slopes(s, d)
        res.append(Residual(f"theta_slope(s={s},d={d})", abs(out["theta_slope"] - out["theta_expected"]), tol["slope"]))
        res.append(Residual(f"nu_slope(s={s},d={d})", abs(out["nu_slope"] - out["nu_expected"]), tol["slope"]))
    for m in (1.0, 2.0):
        dev = freefield.multiplicativity_deviation(freefield.MassMeasure.atomic((m, 1.0)), 0.5, 0.5, 0.3)
        res.append(Residual(f"multiplicative(m={m})", dev, tol["mult"]))
    res.append(Residual("multiplicative(1+2).deviation", freefield.multiplicativity_deviation(pair, 0.5, 0.5), tol["mult_fail"], ">"))
    return CheckResult(res, ["oskit.freefield.theta_t", "oskit.freefield.schwinger_2pt", "oskit.freefield.halfspace_rp_check"])


# ospaths -------------------------------------------------------------------------


@register(
    "paths",
    "ospaths",
    {"markov": 1e-10, "sqexp": 1e-3, "z_cov": 5.0, "heat": 1e-8, "heat_one": 1e-10, "fk_z": 3.0, "mehler": 1e-8, "pss": 1e-12},
    stochastic=True,
)
def paths(payload, tol, seed):
    # instances are fixed; ``seed`` only drives the Monte-Carlo draws
    rng = np.random.default_rng(payload.get("instance_seed", 0))
    times = np.sort(rng.uniform(0.0, 5.0, 8))
    ou = ospaths.ou_covariance(1.0, times)
    markov = max(ospaths.markov_property_check(ou, k)["cross_residual"] for k in range(len(times)))
    sq = ospaths.markov_property_check(ospaths.sqexp_covariance(1.0, [0.0, 1.0, 2.0]), 1)["cross_residual"]
    samples = ospaths.sample_gaussian(ospaths.GaussianSpec("ou", 1.0, (0.0, 0.5, 1.0), seed), payload.get("paths", 100000))
    grid = np.arange(-20.0, 20.0, 0.05)
    f = np.exp(-grid**2 / 2) / np.sqrt(2 * np.pi)
    comp = ospaths.heat_semigroup(ospaths.heat_semigroup(f, grid, 0.3), grid, 0.7) - ospaths.heat_semigroup(f, grid, 1.0)
    one = ospaths.heat_semigroup(np.ones_like(grid), grid, 1.0) - 1.0
    fk = [
        ospaths.feynman_kac_mc(lambda x: (x >= 0) * 1.0, 1.0, 0.0, 100000, seed, breaks=(0.0,)),
        ospaths.feynman_kac_mc(lambda x: np.cos(x), 0.5, 0.3, 100000, seed + 1),
        ospaths.feynman_kac_mc(lambda x: x, 2.0, -1.0, 100000, seed + 2),
    ]
    omega = ospaths.ground_state(grid)
    inner = np.abs(grid) <= 10
    mehler = float(np.max(np.abs(ospaths.mehler_step(omega, grid, 0.5) - omega)[inner]))
    chain = ospaths.random_reversible_chain(rng, 5)
    pss = ospaths.pss_axiom_check(chain, [1, 2, 3, 5], payload.get("trials", 500), seed)
    two = min(ospaths.pss_two_state_exhaustive(p, [1, 2, 3]) for p in (0.1, 0.5, 0.9))
    return CheckResult(
        [
            Residual("ou_markov_residual", markov, tol["markov"]),
            Residual("sqexp_markov_residual", sq, tol["sqexp"], ">"),
            Residual("ou_covariance_max_z", samples["max_z"], tol["z_cov"]),
            Residual("heat_composition", float(np.max(np.abs(comp))), tol["heat"]),
            Residual("heat_constant", float(np.max(np.abs(one))), tol["heat_one"]),
            Residual("feynman_kac_max_abs_z", max(abs(r["z_score"]) for r in fk), tol["fk_z"]),
            Residual("mehler_ground_state", mehler, tol["mehler"]),
            Residual("pss_min_monomial", pss["min_monomial_value"], -tol["pss"], ">="),
            Residual("pss_self_adjoint", pss["self_adjoint_residual"], tol["pss"]),
            Residual("pss_two_state_min", two, -tol["pss"], ">="),
        ],
        ["oskit.ospaths.markov_property_check", "oskit.ospaths.sample_gaussian", "oskit.ospaths.heat_semigroup", "oskit.ospaths.feynman_kac_mc", "oskit.ospaths.mehler_step", "oskit.ospaths.pss_axiom_check"],
        {"ou_empirical_covariance": samples["empirical_covariance"]},
    )


# the built-in battery --------------------------------------------------------------


def battery():
    """Scenario objects of the acceptance battery, in order."""
    text = resources.files("oskit").joinpath("battery.json").read_text()
    return json.loads(text)["scenarios"]
