import numpy as np
import pytest

from thermovisco.tensors import (
    MANDEL_SCALE,
    ElasticityTensors,
    NonCoerciveTensorError,
    SymMatrix2,
    check_symmetries,
    coercivity_constant,
    contract4,
    contract4_field,
    induced_matrix,
    isotropic_tensor,
    max_eigenvalue,
    sqrt_tensor,
    sym_inner,
    tensor_from_induced,
)


@pytest.fixture
def tensor():
    return isotropic_tensor(1.0, 1.0)


@pytest.fixture
def random_tensor():
    """Coercive tensor with all symmetries and otherwise generic entries."""
    rng = np.random.default_rng(11)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return tensor_from_induced(q @ np.diag([0.7, 1.9, 3.2]) @ q.T)


def _random_sym(rng, count):
    # uniform directions in the orthonormal coordinates, stored as (a11, a22, a12)
    return rng.normal(size=(count, 3)) / MANDEL_SCALE


def _brute_contract(tensor, a):
    result = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    result[i, j] += tensor[i, j, k, l] * a[k, l]
    return result


class TestSymMatrix2:
    def test_from_array(self):
        assert SymMatrix2.from_array([[1.0, 2.0], [2.0, 3.0]]) == SymMatrix2(1.0, 3.0, 2.0)

    @pytest.mark.parametrize(
        "array",
        [
            [[1.0, 2.0], [0.0, 3.0]],
            [[1.0, 2.0, 0.0], [2.0, 3.0, 0.0]],
        ],
    )
    def test_from_array_rejects(self, array):
        with pytest.raises(ValueError):
            SymMatrix2.from_array(array)

    def test_inner_and_norm(self):
        a = SymMatrix2(1.0, 2.0, 3.0)

        assert a.inner(SymMatrix2.identity()) == 3.0
        assert a.trace() == 3.0
        assert a.norm() == pytest.approx(np.sqrt(1.0 + 4.0 + 2.0 * 9.0))


class TestIsotropicTensor:
    def test_constants(self, tensor):
        # 2 mu on the deviatoric part, 2 mu + 2 lambda on the trace
        assert coercivity_constant(tensor) == pytest.approx(2.0)
        assert max_eigenvalue(tensor) == pytest.approx(4.0)
        assert check_symmetries(tensor) == 0.0

    def test_contract_identity(self, tensor):
        result = contract4(tensor, SymMatrix2.identity())

        assert result == pytest.approx(SymMatrix2(4.0, 4.0, 0.0))

    @pytest.mark.parametrize(("lam", "mu"), [(1.0, 0.0), (1.0, -1.0), (-2.0, 1.0)])
    def test_rejects_non_coercive(self, lam, mu):
        with pytest.raises(NonCoerciveTensorError):
            isotropic_tensor(lam, mu)

    def test_eigenvalues(self, tensor):
        # trace mode 2 mu + 2 lambda, two traceless modes 2 mu
        assert np.linalg.eigvalsh(induced_matrix(tensor)) == pytest.approx([2.0, 2.0, 4.0], abs=1e-14)

    def test_negative_shear_modulus_reports_negative_constant(self):
        with pytest.raises(NonCoerciveTensorError) as exc_info:
            isotropic_tensor(1.0, -1.0)

        assert exc_info.value.coercivity == pytest.approx(-2.0)
        assert exc_info.value.coercivity < 0


class TestRandomTensor:
    def test_contract4_matches_quadruple_sum(self, random_tensor):
        rng = np.random.default_rng(3)
        for storage in _random_sym(rng, 20):
            a = SymMatrix2(*storage)

            assert contract4(random_tensor, a).to_array() == pytest.approx(
                _brute_contract(random_tensor, a.to_array()), abs=1e-13
            )

    def test_self_adjoint(self, random_tensor):
        rng = np.random.default_rng(5)
        a_fields, b_fields = _random_sym(rng, 50), _random_sym(rng, 50)

        for a_storage, b_storage in zip(a_fields, b_fields):
            a, b = SymMatrix2(*a_storage).to_array(), SymMatrix2(*b_storage).to_array()

            assert np.sum(_brute_contract(random_tensor, a) * b) == pytest.approx(
                np.sum(a * _brute_contract(random_tensor, b)), abs=1e-12
            )

        assert sym_inner(contract4_field(random_tensor, a_fields), b_fields) == pytest.approx(
            sym_inner(a_fields, contract4_field(random_tensor, b_fields)), abs=1e-12
        )

    def test_coercivity_is_lower_bound_of_rayleigh_quotient(self, random_tensor):
        samples = _random_sym(np.random.default_rng(17), 100_000)
        quotients = sym_inner(contract4_field(random_tensor, samples), samples) / sym_inner(samples, samples)
        k = coercivity_constant(random_tensor)

        assert k == pytest.approx(0.7, rel=1e-12)
        assert np.min(quotients) >= k * (1.0 - 1e-12)
        assert np.min(quotients) == pytest.approx(k, rel=1e-2)

    def test_sqrt_composition(self, random_tensor):
        root = sqrt_tensor(random_tensor)
        rng = np.random.default_rng(23)

        for storage in _random_sym(rng, 100):
            a = SymMatrix2(*storage)
            twice = contract4(root, contract4(root, a))

            assert np.array(twice) == pytest.approx(np.array(contract4(random_tensor, a)), abs=1e-10)
        assert check_symmetries(root) < 1e-12
        assert coercivity_constant(root) >= np.sqrt(coercivity_constant(random_tensor)) * (1.0 - 1e-12)


def test_coercivity_matches_minimum_rayleigh_quotient(tensor):
    # the minimum is attained on a plane of traceless matrices, which uniform samples approach closely
    samples = _random_sym(np.random.default_rng(29), 100_000)
    quotients = sym_inner(contract4_field(tensor, samples), samples) / sym_inner(samples, samples)

    assert np.min(quotients) == pytest.approx(coercivity_constant(tensor), rel=1e-6)
    assert np.min(quotients) >= coercivity_constant(tensor) * (1.0 - 1e-12)


def test_contract4_field_matches_pointwise(tensor):
    rng = np.random.default_rng(7)
    field = rng.normal(size=(4, 5, 3))

    result = contract4_field(tensor, field)

    a = SymMatrix2(*field[2, 3])
    assert result[2, 3] == pytest.approx(np.array(contract4(tensor, a)))


def test_sym_inner_counts_off_diagonal_twice():
    a = np.array([1.0, 2.0, 3.0])

    assert sym_inner(a, a) == pytest.approx(1.0 + 4.0 + 18.0)


def test_induced_round_trip(tensor):
    assert tensor_from_induced(induced_matrix(tensor)) == pytest.approx(tensor)


def test_sqrt_tensor(tensor):
    root = sqrt_tensor(tensor)
    matrix = induced_matrix(root)

    assert matrix @ matrix == pytest.approx(induced_matrix(tensor))
    assert coercivity_constant(root) == pytest.approx(np.sqrt(2.0))


class TestElasticityTensors:
    def test_build(self, tensor):
        tensors = ElasticityTensors.build(tensor, 2.0 * tensor, SymMatrix2.identity(0.5))

        assert tensors.k_viscosity == pytest.approx(2.0)
        assert tensors.k_elasticity == pytest.approx(4.0)
        assert tensors.coupling_norm == pytest.approx(np.sqrt(0.5))
        assert tensors.has_coupling

    def test_without_coupling(self, tensor):
        tensors = ElasticityTensors.build(tensor, tensor, SymMatrix2(0.0, 0.0, 0.0))

        assert not tensors.has_coupling

    def test_rejects_asymmetric(self, tensor):
        broken = tensor.copy()
        broken[0, 0, 0, 1] += 0.1

        with pytest.raises(NonCoerciveTensorError, match="symmetries"):
            ElasticityTensors.build(broken, tensor, SymMatrix2.identity())

    def test_rejects_shape(self, tensor):
        with pytest.raises(NonCoerciveTensorError, match="shape"):
            ElasticityTensors.build(np.zeros((2, 2)), tensor, SymMatrix2.identity())

    def test_rejects_semidefinite(self, tensor):
        # lambda = -mu leaves the trace direction without stiffness
        delta = np.eye(2)
        degenerate = -1.0 * np.einsum("ij,kl->ijkl", delta, delta) + (
            np.einsum("ik,jl->ijkl", delta, delta) + np.einsum("il,jk->ijkl", delta, delta)
        )

        with pytest.raises(NonCoerciveTensorError) as exc_info:
            ElasticityTensors.build(tensor, degenerate, SymMatrix2.identity())

        assert exc_info.value.coercivity == pytest.approx(0.0, abs=1e-12)
