import numpy as np
import pytest

from oskit import OskitError, Verdict
from oskit import rphs


def test_twisted_gram_of_fixed_vectors_is_metric():
    theta = np.diag([1.0, 1.0, -1.0])
    space = rphs.RPSpace(theta, np.eye(3)[:, :2])
    assert np.allclose(rphs.twisted_gram(space), np.eye(2))
    assert rphs.check_reflection_positive(space).verdict is Verdict.PSD


def test_negative_direction_is_not_rp():
    space = rphs.RPSpace(np.diag([1.0, -1.0]), np.array([[0.3], [1.0]]))
    assert rphs.check_reflection_positive(space).verdict is Verdict.NOT_PSD
    with pytest.raises(OskitError) as exc:
        rphs.os_quotient(space)
    assert exc.value.code == "NOT_RP"


def test_non_involutive_theta_rejected():
    space = rphs.RPSpace(np.diag([1.0, 2.0]), np.eye(2))
    with pytest.raises(OskitError) as exc:
        space.validate()
    assert exc.value.code == "NON_INVOLUTIVE_THETA"


def test_rank_deficient_basis():
    space = rphs.RPSpace(np.eye(2), np.array([[1.0, 2.0], [1.0, 2.0]]))
    with pytest.raises(OskitError):
        rphs.check_reflection_positive(space)
    report = rphs.check_reflection_positive(space, strict=False)
    assert report.verdict is Verdict.INDEFINITE_BASIS


def test_graph_subspace_contraction_is_rp(rng):
    space, ker, c = rphs.graph_space(rng, 3, 2, [0.4, 0.9])
    assert rphs.check_reflection_positive(space).is_psd
    q = rphs.os_quotient(space)
    assert q.rank == 3
    assert np.allclose(q.qmap.conj().T @ q.qmap, rphs.twisted_gram(space), atol=1e-10)


def test_quotient_rank_drops_for_isometric_directions(rng):
    space, ker, c = rphs.graph_space(rng, 2, 2, [1.0, 0.5])
    assert rphs.os_quotient(space).rank == 1


def test_fully_isometric_graph_has_zero_quotient(rng):
    space, ker, c = rphs.graph_space(rng, 1, 1, [1.0])
    q = rphs.os_quotient(space)
    assert q.rank == 0
    assert rphs.os_transform(space, q, np.eye(1)).shape == (0, 0)


def test_os_transform_is_contractive(rng):
    for _ in range(20):
        space, _, _ = rphs.graph_space(rng, 3, 3, rng.uniform(0, 1, 3))
        s = rphs.random_theta_symmetric(rng, space)
        hat = rphs.os_transform(space, rphs.os_quotient(space), s)
        assert np.linalg.norm(hat, 2) <= rphs.restricted_norm(space, s) + 1e-10


def test_twisted_unitary_squares_to_identity(rng):
    space, u = rphs.twisted_unitary_model(rng, 2, 2)
    q = rphs.os_quotient(space)
    hat = rphs.os_transform(space, q, rphs.coordinates(space, u @ space.plus_basis))
    assert np.allclose(hat @ hat, np.eye(q.rank), atol=1e-9)


def test_nullspace_not_preserved(rng):
    space, _, _ = rphs.graph_space(rng, 2, 2, [1.0, 0.3], scramble=False)
    q = rphs.os_quotient(space)
    s = rng.normal(size=(2, 2))
    with pytest.raises(OskitError) as exc:
        rphs.os_transform(space, q, s)
    assert exc.value.code == "NULLSPACE_NOT_PRESERVED"


def test_markov_criteria_agree(rng):
    for sv in ([0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [0.3, 0.8]):
        space, ker, _ = rphs.graph_space(rng, 2, 2, sv)
        out = rphs.markov_check(space, ker)
        assert out.criteria_agree


def test_markov_trivial_cases(rng):
    space, ker, _ = rphs.graph_space(rng, 2, 2, [0.0, 0.0])
    assert rphs.markov_check(space, ker).is_markov
    space, ker, _ = rphs.graph_space(rng, 2, 2, [0.5, 0.0])
    assert not rphs.markov_check(space, ker).is_markov


def test_e0_must_be_fixed():
    space = rphs.RPSpace(np.diag([1.0, -1.0]), np.eye(2)[:, :1])
    with pytest.raises(OskitError) as exc:
        rphs.markov_check(space, np.array([0.0, 1.0]))
    assert exc.value.code == "E0_NOT_FIXED"


def test_graph_subspace_eigenspace_mismatch():
    theta = np.diag([1.0, -1.0])
    with pytest.raises(OskitError) as exc:
        rphs.graph_subspace(theta, np.array([[1.0], [0.0]]), np.eye(2))
    assert exc.value.code == "EIGENSPACE_MISMATCH"
