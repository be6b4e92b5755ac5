"""End-to-end acceptance checks; each prints one ``criterion N: PASS|FAIL`` line."""
import io
import time

import numpy as np
import pytest

from hqdetect.classical.forest import RfConfig, train_rf
from hqdetect.classical.metrics import confusion_matrix, metrics_from_cm
from hqdetect.cli import main, split_indices
from hqdetect.hybrid import HybridConfig, train_hybrid
from hqdetect.pipeline import ConstantHead, assemble_pipeline, classify, classify_dataset, stage_counts
from hqdetect.quantum.channels import QuantumChannel, channel_adjoint_apply, channel_apply
from hqdetect.quantum.core import (
    Gate,
    Observable,
    ParameterizedCircuit,
    QuantumState,
    evolve,
    pauli_observable,
    random_density,
    random_hermitian,
    random_state,
    random_unitary,
    rotation_matrix,
)
from hqdetect.quantum.estimators import resource_counts, swap_trick_purity
from hqdetect.quantum.training import (
    NetworkLayer,
    TrainConfig,
    adjoint_backprop_grad,
    apply_updates,
    circuit_as_network,
    circuit_expectation,
    commutator_update_matrices,
    finite_difference_grad,
    network_fidelity,
    parameter_shift_grad,
    train_commutator,
)
from hqdetect.telemetry import GeneratorSpec, MasterTelemetryRecord, generate_dataset


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return emit


def test_criterion_01_metric_oracle(report):
    t0 = time.perf_counter()
    r = metrics_from_cm(np.array([[1145, 23], [84, 1748]]))
    perfect = metrics_from_cm(np.array([[2229, 0], [0, 771]]))
    ms = 1000 * (time.perf_counter() - t0)
    ok = (abs(r.accuracy - 0.96433) < 1e-5 and abs(r.precision[1] - 0.98701) < 1e-5
          and abs(r.recall[1] - 0.95415) < 1e-5
          and abs(r.accuracy - 2893 / 3000) < 1e-12
          and perfect.accuracy == 1.0
          and all(v == 1.0 for v in perfect.precision + perfect.recall + perfect.f1))
    report(1, ok, f"accuracy={r.accuracy:.6f} precision={r.precision[1]:.6f} "
                  f"recall={r.recall[1]:.6f} perfect=1.0 ({ms:.2f} ms)")
    assert ok


def _random_circuit(rng):
    n = int(rng.integers(1, 4))
    return n, ParameterizedCircuit.layered(n, rng.uniform(-np.pi, np.pi, (int(rng.integers(1, 4)), n)), "ring")


def test_criterion_02_quantum_identities(report):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    norm_err = trace_err = adj_err = swap_err = 0.0
    for _ in range(100):
        n, c = _random_circuit(rng)
        norm_err = max(norm_err, abs(np.linalg.norm(evolve(random_state(n, rng).amplitudes, c)) - 1))

        ch = QuantumChannel(random_unitary(2 ** (n + 1), rng), n, 1)
        B = random_density(n, rng)
        trace_err = max(trace_err, abs(np.trace(channel_apply(ch, B).matrix) - 1))

        A = Observable(random_hermitian(2**n, rng))
        lhs = np.trace(A.matrix @ channel_apply(ch, B).matrix)
        rhs = np.trace(channel_adjoint_apply(ch, A).matrix @ B.matrix)
        adj_err = max(adj_err, abs(lhs - rhs))

        swap_err = max(swap_err, abs(swap_trick_purity(B) - np.trace(B.matrix @ B.matrix).real))
    secs = time.perf_counter() - t0
    ok = max(norm_err, trace_err, adj_err, swap_err) < 1e-10 and secs < 10
    report(2, ok, f"max errors norm={norm_err:.1e} trace={trace_err:.1e} adjoint={adj_err:.1e} "
                  f"swap={swap_err:.1e} ({secs:.2f} s)")
    assert ok


def test_criterion_03_gradients(report):
    rng = np.random.default_rng(3)
    kinds = ("RX", "RY", "RZ")
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        n, layers = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        gates = []
        for _ in range(layers):
            gates += [Gate(kinds[rng.integers(3)], (q,), rng.uniform(-np.pi, np.pi)) for q in range(n)]
            gates += [Gate("CNOT", (q, q + 1)) for q in range(n - 1)]
        c = ParameterizedCircuit(n, tuple(gates))
        s = random_state(n, rng)
        obs = Observable(random_hermitian(2**n, rng))
        ps = parameter_shift_grad(c, s, obs).values
        adj = adjoint_backprop_grad(circuit_as_network(c), s, obs).values
        fd = finite_difference_grad(lambda t: circuit_expectation(c.with_parameters(t), s, obs), c.parameters)
        worst = max(worst, np.abs(ps - adj).max(), np.abs(ps - fd).max())
    analytic = 0.0
    for theta in np.linspace(-np.pi, np.pi, 13):
        c = ParameterizedCircuit(1, (Gate("RY", (0,), theta),))
        g = parameter_shift_grad(c, QuantumState.zero(1), pauli_observable("Z")).values[0]
        analytic = max(analytic, abs(g + np.sin(theta)))
    secs = time.perf_counter() - t0
    ok = worst < 1e-6 and analytic < 1e-10 and secs < 30
    report(3, ok, f"max disagreement={worst:.1e} analytic error={analytic:.1e} ({secs:.2f} s)")
    assert ok


def test_criterion_04_commutator_toy_task(report):
    zero, one = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    batch = [(zero, one)]
    gate = Gate("UNITARY", (0,), unitary=rotation_matrix("RY", 0.3), tunable=True)
    layers = [NetworkLayer(ParameterizedCircuit(1, (gate,)), 1, 0)]
    cfg = TrainConfig()
    t0 = time.perf_counter()
    fid = [network_fidelity(layers, batch)]
    unitary_err = 0.0
    for _ in range(cfg.epochs):
        updates = commutator_update_matrices(batch, layers, cfg.regularization)
        layers = apply_updates(layers, updates, cfg.learning_rate)
        u = layers[0].circuit.gates[0].matrix()
        unitary_err = max(unitary_err, np.abs(u @ u.conj().T - np.eye(2)).max())
        fid.append(network_fidelity(layers, batch))
        if fid[-1] >= 0.99:
            break
    secs = time.perf_counter() - t0
    _, hist = train_commutator(
        [NetworkLayer(ParameterizedCircuit(1, (gate,)), 1, 0)], batch, cfg)
    monotone = all(b >= a - 1e-9 for a, b in zip(hist.fidelity, hist.fidelity[1:]))
    ok = fid[-1] >= 0.99 and len(fid) - 1 <= 200 and monotone and unitary_err < 1e-8 and secs < 5
    report(4, ok, f"fidelity {fid[0]:.4f} -> {fid[-1]:.4f} after {len(fid) - 1} updates, "
                  f"final after {len(hist.fidelity) - 1} = {hist.fidelity[-1]:.6f}, "
                  f"unitarity error={unitary_err:.1e} ({secs:.2f} s)")
    assert ok


def test_criterion_05_resources(report):
    copies = resource_counts(1, [1, 2, 1], []).n_copies
    tomo = resource_counts(1, [1, 1], [2, 2]).n_tomography
    direct_copies = 2 * (4 ** (1 + 1) - 1) + 1 * (4 ** (2 + 1) - 1)
    direct_tomo = 1 * 2 * ((2 * 2) ** 2 - 1)
    ok = copies == direct_copies == 93 and tomo == direct_tomo == 30
    report(5, ok, f"copies={copies} tomography={tomo}")
    assert ok


def test_criterion_06_gating_equivalence(report):
    record = MasterTelemetryRecord(np.full(23, 0.5))
    mismatches = 0
    for f1 in (0, 1):
        for f2 in (0, 1):
            for f3 in range(6):
                p3 = np.full(6, 0.1)
                p3[f3] = 0.5
                pipe = assemble_pipeline(ConstantHead([1 - 0.8 * f1 - 0.1, 0.8 * f1 + 0.1]),
                                         ConstantHead([1 - 0.8 * f2 - 0.1, 0.8 * f2 + 0.1]),
                                         ConstantHead(p3))
                expected = 0 if f1 == 0 else (0 if f2 == 0 else f3)
                mismatches += classify(pipe, record).final_label != expected
    report(6, mismatches == 0, f"24 cases, {mismatches} mismatches")
    assert mismatches == 0


def _layer3_accuracy(ds, train, test, encoding):
    X, y = ds.view(3), ds.labels(3)
    cfg = HybridConfig(encoding, "serial", "rf", rf=RfConfig(seed=42), n_classes=6)
    model = train_hybrid(X[train], y[train], cfg)
    return float(np.mean(model.predict(X[test]) == y[test]))


def test_criterion_07_encoding_trend(report):
    t0 = time.perf_counter()
    ds = generate_dataset(GeneratorSpec(n_samples=3000, seed=42))
    train, test = split_indices(len(ds), 0.7, 42)
    full = _layer3_accuracy(ds, train, test, "full")
    amp3 = _layer3_accuracy(ds, train, test, "amplitude3")
    secs = time.perf_counter() - t0
    ok = full >= 0.95 and full - amp3 >= 0.05 and secs < 300
    report(7, ok, f"full serial RF={full:.4f} amplitude3 serial RF={amp3:.4f} "
                  f"gap={full - amp3:+.4f} ({secs:.1f} s)")
    assert ok


def test_criterion_08_anomaly_layer(report):
    t0 = time.perf_counter()
    ds = generate_dataset(GeneratorSpec(n_samples=3000, seed=42, delta=0.3, sigma=0.08, rho=0.0))
    train, test = split_indices(len(ds), 0.7, 42)
    X, y = ds.view(1), ds.labels(1)
    model = train_rf(X[train], y[train], RfConfig(seed=42, n_classes=2))
    acc = float(np.mean(model.predict(X[test]) == y[test]))
    secs = time.perf_counter() - t0
    ok = acc >= 0.99 and secs < 60
    report(8, ok, f"layer-1 RF held-out accuracy={acc:.4f} ({secs:.1f} s)")
    assert ok


def test_criterion_09_end_to_end(report):
    t0 = time.perf_counter()
    ds = generate_dataset(GeneratorSpec(n_samples=3000, seed=42, rho=0.05))
    train, test = split_indices(len(ds), 0.7, 42)
    tr, te = ds.subset(train), ds.subset(test)
    heads = [train_rf(tr.view(v), tr.labels(v), RfConfig(seed=42, n_classes=k))
             for v, k in ((1, 2), (2, 2), (3, 6))]
    outcomes = classify_dataset(assemble_pipeline(*heads), te)
    counts = stage_counts(outcomes)
    normal = te.attack_class == 0
    normal_clear = np.mean([o.stage == "L1-clear" for o, n in zip(outcomes, normal) if n])
    cm = confusion_matrix(te.attack_class, [o.final_label for o in outcomes], 6)
    diag = np.trace(cm.counts) / cm.total
    secs = time.perf_counter() - t0
    ok = sum(counts.values()) == len(te) and normal_clear >= 0.90 and diag >= 0.90 and secs < 120
    report(9, ok, f"stages={counts} normal at L1-clear={normal_clear:.4f} "
                  f"diagonal share={diag:.4f} ({secs:.1f} s)")
    assert ok


def _run(argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], stdout=buf)
    return code, buf.getvalue()


def _snapshot(root):
    skip = {"timing.json"}
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*"))
            if p.is_file() and p.name not in skip}


def test_criterion_10_determinism(report, tmp_path):
    def everything(root):
        root.mkdir()
        cfg = root / "exp.cfg"
        cfg.write_text("n = 600\nseed = 9\nrf_trees = 10\nlayers = 1, 2, 3\n"
                       "encodings = none, full\nheads = rf\n")
        outs = [_run(["gen", "--n", 600, "--seed", 9, "--out", root / "data.csv"])]
        outs.append(_run(["train-eval", "--config", cfg, "--out", root / "runs"]))
        models = "".join(f"l{v}_model = {root / 'runs' / f'L{v}_none_serial_rf' / 'model.json'}\n"
                         for v in (1, 2, 3))
        pcfg = root / "pipe.cfg"
        pcfg.write_text("n = 600\nseed = 10\n" + models)
        outs.append(_run(["pipeline", "--config", pcfg, "--out", root / "pipe"]))
        outs.append(_run(["export-latent", "--model", root / "runs" / "L3_full_serial_rf" / "model.json",
                          "--n", 200, "--out", root / "z.csv"]))
        outs.append(_run(["resources", "--m-list", "1,2,1"]))
        return outs

    a = everything(tmp_path / "a")
    b = everything(tmp_path / "b")
    codes = [c for c, _ in a + b]
    snap_a, snap_b = _snapshot(tmp_path / "a"), _snapshot(tmp_path / "b")
    # config files name their own directory; compare everything the commands wrote
    differ = [k for k in snap_a if not k.endswith(".cfg") and snap_a[k] != snap_b.get(k)]
    stdout_same = [x[1] for x in a] == [x[1] for x in b]
    ok = all(c == 0 for c in codes) and not differ and stdout_same and set(snap_a) == set(snap_b)
    report(10, ok, f"{len(snap_a)} artifacts compared across 5 commands, {len(differ)} differ")
    assert ok
