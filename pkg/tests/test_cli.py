import io
import subprocess
import sys

import pytest

from treeseries.cli import run
from treeseries.document import parse_document
from treeseries.series import behavior, equiv_up_to
from treeseries.terms import App, Param

DOC = """\
semiring nat
alphabet sigma/2 gamma/1
params a b
desc D1
  final 1 0
  x1 = 2 * sigma(x1, x2) + 3 * a
  x2 = 5 * b
end
desc P
  final 1 1
  x1 = sigma(sigma(a, x1), x2) + sigma(x1, x2)
  x2 = sigma(b, x1)
end
desc SIX
  final 1
  x1 = 6 * a
end
desc TWO
  final 3
  x1 = 2 * a
end
desc FIVE
  final 1
  x1 = 5 * a
end
"""


@pytest.fixture
def doc_path(tmp_path):
    p = tmp_path / "doc.txt"
    p.write_text(DOC, encoding="utf-8")
    return str(p)


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_coeff(doc_path):
    assert cli("-d", doc_path, "coeff", "D1", "sigma(a,b)") == (0, "30\n", "")
    assert cli("-d", doc_path, "coeff", "D1", "gamma(a)")[1] == "0\n"


def test_equiv_same(doc_path):
    assert cli("-d", doc_path, "equiv", "--height", "4", "D1", "D1") == (0, "equivalent up to height 4\n", "")


def test_equiv_counterexample(doc_path):
    code, out, _ = cli("-d", doc_path, "equiv", "--height", "3", "SIX", "FIVE")
    assert code == 1
    assert out == "not equivalent: a\t6\t5\n"


def test_check_sim(doc_path, tmp_path):
    m = tmp_path / "m.txt"
    m.write_text("1 1\n3\n", encoding="utf-8")
    assert cli("-d", doc_path, "check-sim", "SIX", "TWO", "--matrix", str(m)) == (0, "simulation\n", "")
    m.write_text("1 1\n1\n", encoding="utf-8")
    assert cli("-d", doc_path, "check-sim", "SIX", "TWO", "--matrix", str(m))[:2] == (1, "not a simulation\n")


def test_find_sim(doc_path):
    assert cli("-d", doc_path, "find-sim", "SIX", "TWO", "--universe", "0", "1", "2", "3", "4") == (0, "1 1\n3\n", "")
    assert cli("-d", doc_path, "find-sim", "SIX", "FIVE", "--universe", "0", "1", "2")[0] == 1


def test_flatten(doc_path):
    code, out, _ = cli("-d", doc_path, "flatten", "P", "--name", "E")
    assert code == 0
    flat = parse_document(out)["E"]
    assert flat.n_vars == 5
    assert equiv_up_to(parse_document(DOC)["P"], flat, 4)


def test_normalize_initial(doc_path):
    code, out, _ = cli("-d", doc_path, "normalize-initial", "TWO")
    assert code == 0
    d = parse_document(out)["TWO"]
    assert d.final == (1, 0)
    assert equiv_up_to(d, parse_document(DOC)["TWO"], 3)


def test_enumerate(doc_path):
    code, out, _ = cli("-d", doc_path, "enumerate", "D1", "--height", "2")
    assert code == 0
    assert out.splitlines()[:2] == ["a\t3", "sigma(a, b)\t30"]
    assert "sigma(sigma(a, b), b)\t300" in out.splitlines()


def test_combine(doc_path):
    code, out, _ = cli("-d", doc_path, "combine", "sum", "SIX", "TWO")
    assert code == 0
    total = parse_document(out)["result"]
    assert total.final == (1, 3)
    code, out, _ = cli("-d", doc_path, "combine", "scale", "3", "TWO", "--name", "S")
    assert code == 0 and parse_document(out)["S"].final == (9,)
    code, out, _ = cli("-d", doc_path, "combine", "sigma", "gamma", "SIX")
    assert code == 0
    assert behavior(parse_document(out)["result"], 2).coeffs == {App("gamma", [Param("a")]): 6}


def test_subst(doc_path):
    code, out, _ = cli("-d", doc_path, "subst", "SIX", "--bind", "a=TWO", "--bind", "b=TWO")
    assert code == 0
    assert behavior(parse_document(out)["SIX"], 2).coeffs == {Param("a"): 36}


@pytest.mark.parametrize("argv", [
    ["coeff", "NOPE", "a"],
    ["coeff", "D1", "sigma(a)"],
    ["coeff", "D1", "x1"],
    ["combine", "scale", "TWO"],
    ["subst", "SIX", "--bind", "oops"],
    ["equiv", "D1"],
    ["bogus"],
])
def test_usage_errors_exit_2(doc_path, argv):
    code, _, err = cli("-d", doc_path, *argv)
    assert code == 2
    assert err


def test_semiring_mismatch(doc_path):
    code, _, err = cli("-d", doc_path, "--semiring", "bool", "coeff", "D1", "a")
    assert code == 2 and "semiring" in err
    assert cli("-d", doc_path, "--semiring", "nat", "coeff", "D1", "a")[:2] == (0, "3\n")


def test_missing_file(tmp_path):
    assert cli("-d", str(tmp_path / "none.txt"), "coeff", "D1", "a")[0] == 2


def test_height_cap(doc_path):
    deep = "sigma(" * 7 + "a" + ", b)" * 7
    assert cli("-d", doc_path, "coeff", "D1", deep)[0] == 2
    assert cli("-d", doc_path, "--max-height", "7", "coeff", "D1", deep)[0] == 0


def test_byte_for_byte_reproducible(doc_path):
    runs = [cli("-d", doc_path, "flatten", "P") for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]


def test_stdin_and_entry_point(doc_path):
    proc = subprocess.run([sys.executable, "-m", "treeseries", "-d", "-", "coeff", "D1", "sigma(a, b)"],
                          input=DOC, capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "30\n"
