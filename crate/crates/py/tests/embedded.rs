use graph_poincare_py::graph_poincare_py;
use pyo3::prelude::*;

#[test]
fn module_runs_in_embedded_interpreter() {
    pyo3::append_to_inittab!(graph_poincare_py);
    Python::initialize();
    Python::attach(|py| {
        py.run(
            c"
import graph_poincare_py as gp
g, t = gp.kary_tree(2, 2, 0.25)
assert len(g) == 7
assert t.summary(g).john_constant == 1.75
f = [1.0, -1.0, 0.5, 0.0, 2.0, -3.0, 0.25]
d = gp.decompose(f, g, t)
assert len(d.pieces()) == 6
try:
    gp.WeightedGraph([0.0], [])
except ValueError as e:
    assert 'nonpositive weight' in str(e)
else:
    raise AssertionError('expected ValueError')
ratio, _ = gp.estimate_sharp_constant(gp.WeightedGraph([1.0, 1.0], [(0, 1)]), 2.0)
assert abs(ratio - 0.5) < 1e-6
",
            None,
            None,
        )
        .inspect_err(|e| e.print(py))
        .unwrap();
    });
}
