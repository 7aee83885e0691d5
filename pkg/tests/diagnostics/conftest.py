import pytest

from thermovisco.diagnostics import DiagnosticsEvaluator, DiagnosticsRecord


def make_record(t: float = 0.0, **values) -> DiagnosticsRecord:
    fields = {name: 0.0 for name in DiagnosticsRecord._fields}
    fields.update(t=t, theta_min=1.0)
    fields.update(values)
    return DiagnosticsRecord(**fields)


@pytest.fixture
def evaluator(operators, tensors, heat_capacity, forcing):
    return DiagnosticsEvaluator(operators, tensors, heat_capacity, 1.0, forcing)
