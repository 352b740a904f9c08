import os

import numpy as np
import pytest

from bpcheb.exprlang import parse
from bpcheb.problem import OutputSpec, ProblemError, dumps, load, loads

PROBLEMS_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "problems")

MINIMAL = """
[system]
n = 1
r = 1
t0 = 0
tf = 1
x0 = [0]
B = [["1"]]
u = ["1"]

[solve]
K = 2
M = 3
"""


class TestLoads:
    def test_minimal(self):
        p = loads(MINIMAL)
        assert (p.n, p.r, p.K, p.M) == (1, 1, 2, 3)
        assert p.A is None and p.N is None
        assert p.breakpoints is None
        assert p.output == OutputSpec()

    def test_polynomial_benchmark_file(self):
        p = load(os.path.join(PROBLEMS_DIR, "polynomial_ivp.prob"))
        assert (p.n, p.r, p.K, p.M) == (2, 1, 3, 4)
        assert p.A[0][0] == parse("t^2+1")
        assert p.A[0][1] == parse("-t")
        assert p.N[0][0] == parse("s")
        assert p.B[1][0] == parse("2*t^2-t^3")
        assert p.output.exact == (parse("t^2"), parse("t^3"))
        spec = p.system_spec()
        np.testing.assert_allclose(spec.A(0.5), [[1.25, -0.5], [0.0, 1.0]])
        np.testing.assert_allclose(spec.N(0.5, 0.25), [[0.25, 3.0], [0.75, 0.0]])
        cfg = p.basis_config()
        assert cfg.K == 3 and cfg.M == 4

    def test_syntax_error_names_the_cell(self):
        bad = MINIMAL.replace('B = [["1"]]', 'B = [["3t"]]')
        with pytest.raises(ProblemError, match=r"\[system\].B\[0\]\[0\]"):
            loads(bad)

    def test_s_only_allowed_in_kernel(self):
        bad = MINIMAL.replace('u = ["1"]', 'u = ["s"]')
        with pytest.raises(ProblemError, match="inner variable s"):
            loads(bad)
        withn = MINIMAL.replace('B = [["1"]]', 'B = [["1"]]\nN = [["s*t"]]')
        assert loads(withn).N is not None

    def test_explicit_breakpoints_accepted(self):
        text = MINIMAL + "\n"
        text = text.replace("K = 2", "K = 2\nbreakpoints = [0, 0.2, 1.0]")
        p = loads(text)
        assert p.breakpoints == (0.0, 0.2, 1.0)
        assert p.basis_config().partition.widths == (0.2, 0.8)

    def test_breakpoint_count_must_match_k(self):
        text = MINIMAL.replace("K = 2", "K = 2\nbreakpoints = [0, 1.0]")
        with pytest.raises(ProblemError, match="K\\+1"):
            loads(text)

    def test_breakpoints_must_span_interval(self):
        text = MINIMAL.replace("K = 2", "K = 2\nbreakpoints = [0, 0.5, 0.9]")
        with pytest.raises(ProblemError, match="span"):
            loads(text)

    def test_missing_section(self):
        with pytest.raises(ProblemError, match=r"missing \[solve\]"):
            loads("[system]\nn = 1\nr = 1\nt0 = 0\ntf = 1\nx0 = [0]\n")

    def test_missing_required_key(self):
        with pytest.raises(ProblemError, match=r"\[system\].n is required"):
            loads("[system]\nr = 1\n\n[solve]\nK = 1\nM = 1\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ProblemError, match="unknown keys"):
            loads(MINIMAL + "\nwhatever = 3\n")

    def test_unknown_section_rejected(self):
        with pytest.raises(ProblemError, match="unknown section"):
            loads("[systems]\nn = 1\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ProblemError, match="duplicate key"):
            loads(MINIMAL + "\nM = 4\n")

    def test_grid_shape_must_match_dimensions(self):
        bad = MINIMAL.replace('B = [["1"]]', 'B = [["1"], ["2"]]')
        with pytest.raises(ProblemError, match="1x1 grid"):
            loads(bad)

    def test_x0_length(self):
        bad = MINIMAL.replace("x0 = [0]", "x0 = [0, 1]")
        with pytest.raises(ProblemError, match="x0"):
            loads(bad)

    def test_output_validation(self):
        with pytest.raises(ProblemError, match="points"):
            loads(MINIMAL + "\n[output]\npoints = [0.5]\neval_points = 7\n")
        with pytest.raises(ProblemError, match="format"):
            loads(MINIMAL + "\n[output]\nformat = json\n")
        with pytest.raises(ProblemError, match="lie in"):
            loads(MINIMAL + "\n[output]\npoints = [2.0]\n")

    def test_key_outside_section(self):
        with pytest.raises(ProblemError, match="outside"):
            loads("n = 1\n")

    def test_file_not_found(self):
        with pytest.raises(ProblemError, match="cannot read"):
            load("/nonexistent/path.prob")


class TestRoundTrip:
    @pytest.mark.parametrize("fname", ["polynomial_ivp.prob", "exp_decay_ivp.prob"])
    def test_shipped_problems(self, fname):
        p = load(os.path.join(PROBLEMS_DIR, fname))
        assert loads(dumps(p)) == p

    def test_non_uniform_with_eval_points(self):
        text = MINIMAL.replace("K = 2", "K = 2\nbreakpoints = [0, 0.25, 1.0]")
        text += "\n[output]\neval_points = 7\nformat = table\n"
        p = loads(text)
        assert loads(dumps(p)) == p
        assert len(p.output.resolve_points(p.t0, p.tf)) == 7


class TestOverrides:
    def test_m_override(self):
        p = loads(MINIMAL).with_overrides(M=6)
        assert p.M == 6 and p.K == 2

    def test_k_override_uniform(self):
        p = loads(MINIMAL).with_overrides(K=5)
        assert p.K == 5
        assert p.basis_config().K == 5

    def test_k_override_conflicts_with_explicit_breakpoints(self):
        text = MINIMAL.replace("K = 2", "K = 2\nbreakpoints = [0, 0.25, 1.0]")
        with pytest.raises(ProblemError, match="breakpoints"):
            loads(text).with_overrides(K=3)
