"""Build the extension module, import it, and exercise the main entry points.

Usage: python3 python/smoke_test.py [--no-build]
"""

import importlib.util
import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
MODULE = "graph_poincare_py"


def build() -> Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "graph-poincare-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    return ROOT / "target" / "release" / f"lib{MODULE}.so"


def load(library: Path, workdir: Path):
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    target = workdir / f"{MODULE}{suffix}"
    shutil.copy(library, target)
    spec = importlib.util.spec_from_file_location(MODULE, target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main() -> int:
    library = ROOT / "target" / "release" / f"lib{MODULE}.so"
    if "--no-build" not in sys.argv or not library.exists():
        library = build()
    with tempfile.TemporaryDirectory() as tmp:
        gp = load(library, Path(tmp))

        g, t = gp.kary_tree(2, 2, 0.25)
        summary = t.summary(g)
        assert summary.john_constant == 1.75, summary
        assert summary.tree_degree_bound == 3

        f = [1.0, -2.0, 0.5, 0.25, 3.0, -1.0, 0.75]
        tf = gp.apply_hardy(f, g, t)
        assert max(tf) <= max(abs(x) for x in f) * (1 + 1e-12)

        mean = sum(x * w for x, w in zip(f, g.weights)) / g.total_measure()
        zero_mean = [x - mean for x in f]
        pieces = gp.decompose(zero_mean, g, t)
        rebuilt = pieces.reconstruct()
        assert all(abs(a - b) < 1e-12 for a, b in zip(rebuilt, zero_mean))

        ratio, bound, passes = gp.global_ratio(zero_mean, g, t, 2.0, "tree")
        assert passes and ratio <= bound
        assert math.isclose(gp.theoretical_constant(1.75, 3, 2.0), 1.75 * 3 * 2 * math.sqrt(2))

        edge = gp.WeightedGraph([1.0, 1.0], [(0, 1)])
        best, witness = gp.estimate_sharp_constant(edge, 2.0)
        assert abs(best - 0.5) < 1e-6 and len(witness) == 2

        path = Path(tmp) / "graph.json"
        gp.save_graph(str(path), g, t)
        g2, t2 = gp.load_graph(str(path))
        assert g2.weights == g.weights and t2.parents == t.parents

        try:
            gp.WeightedGraph([1.0, 0.0], [(0, 1)])
        except ValueError as err:
            assert "nonpositive weight" in str(err)
        else:
            raise AssertionError("zero weight accepted")

        lp, lt = gp.log_path(1000)
        assert lt.summary(lp).john_constant > 300

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
