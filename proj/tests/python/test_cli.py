import os
import struct
import subprocess
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import spearmanr

ROOT = Path(__file__).resolve().parents[2]
CLI = Path(os.environ.get("SAMS_CLI", ROOT / "build" / "tools" / "sams"))

pytestmark = pytest.mark.skipif(not CLI.exists(), reason="sams executable not built")

CORPUS = """the fisherman rowed to the river bank
the banker counted money at the bank
a clerk deposited cash in the bank
the otter swam along the river bank
"""

TREES = """((the fisherman) (rowed (to ((the river) bank))))
((the banker) ((counted money) (at (the bank))))
((a clerk) ((deposited cash) (in (the bank))))
((the otter) ((swam along) ((the river) bank)))
"""

SIMILARITY = """bank\triver\tthe <t>bank</t> of the river\tthe <t>river</t> bank\t8.0
bank\tmoney\tcash at the <t>bank</t>\tsome <t>money</t>\t6.0
otter\tclerk\tthe <t>otter</t> swam\ta <t>clerk</t> counted\t1.0
"""


def run(*args):
    return subprocess.run([str(CLI), *map(str, args)], capture_output=True, text=True)


def read_checkpoint(path):
    data = Path(path).read_bytes()
    pos = 0

    def line():
        nonlocal pos
        end = data.index(b"\n", pos)
        text = data[pos:end].decode()
        pos = end + 1
        return text

    assert line() == "SAMS v1"
    header = line().split()
    vocab_size = int(header[header.index("vocab") + 1])
    tokens = [line().split("\t")[0] for _ in range(vocab_size)]
    blocks = {}
    while pos < len(data):
        _, name, rows, cols = line().split()
        rows, cols = int(rows), int(cols)
        count = rows * cols
        values = struct.unpack_from("<%df" % count, data, pos)
        pos += 4 * count
        blocks[name] = np.array(values, dtype=np.float64).reshape(rows, cols)
    return tokens, blocks


@pytest.fixture
def files(tmp_path):
    (tmp_path / "corpus.txt").write_text(CORPUS)
    (tmp_path / "trees.txt").write_text(TREES)
    (tmp_path / "sim.tsv").write_text(SIMILARITY)
    return tmp_path


def train(files, name, *extra):
    out = files / name
    result = run("train-generic", "--corpus", files / "corpus.txt", "--trees", files / "trees.txt",
                 "--dim", 6, "--senses", 2, "--hidden", 4, "--seed", 5, "--out", out, *extra)
    assert result.returncode == 0, result.stderr
    return out


def test_grad_check_gate():
    result = run("grad-check", "--dim", 8, "--hidden", 6, "--seed", 1)
    assert result.returncode == 0, result.stderr
    worst = float(result.stdout.strip().splitlines()[-1].split()[-1])
    assert worst < 1e-4


def test_seeded_initialization_determines_neighbors(files):
    a = train(files, "a.sams", "--epochs", 0)
    b = train(files, "b.sams", "--epochs", 0)
    assert a.read_bytes() == b.read_bytes()
    first = run("neighbors", "--model", a, "--word", "bank", "-k", 4)
    second = run("neighbors", "--model", b, "--word", "bank", "-k", 4)
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout

    tokens, blocks = read_checkpoint(a)
    main = blocks["main"]
    q = tokens.index("bank")
    cos = main @ main[q] / (np.linalg.norm(main, axis=1) * np.linalg.norm(main[q]))
    order = [i for i in np.argsort(-cos, kind="stable") if i not in (0, q)][:4]
    listed = [row.split("\t") for row in first.stdout.strip().splitlines()]
    assert [t for t, _ in listed] == [tokens[i] for i in order]
    for (_, score), i in zip(listed, order):
        assert float(score) == pytest.approx(cos[i], abs=1e-6)


def test_similarity_report_matches_rank_oracle(files):
    model = train(files, "m.sams", "--epochs", 1)
    result = run("eval-similarity", "--model", model, "--data", files / "sim.tsv", "--metric", "global")
    assert result.returncode == 0, result.stderr
    metric, value, n = result.stdout.strip().split("\t")
    assert metric == "globalSim" and n == "3"

    tokens, blocks = read_checkpoint(model)
    main = blocks["main"]

    def cos(a, b):
        u, v = main[tokens.index(a)], main[tokens.index(b)]
        return u @ v / (np.linalg.norm(u) * np.linalg.norm(v))

    sims = [cos("bank", "river"), cos("bank", "money"), cos("otter", "clerk")]
    expected = spearmanr(sims, [8.0, 6.0, 1.0]).statistic
    assert float(value) == pytest.approx(expected, abs=1e-6)

    everything = run("eval-similarity", "--model", model, "--data", files / "sim.tsv", "--metric", "all")
    assert [r.split("\t")[0] for r in everything.stdout.strip().splitlines()] == [
        "globalSim", "localSim", "avgSim"]


def test_training_log_and_paraphrase_round(files):
    result = run("train-generic", "--corpus", files / "corpus.txt", "--encoder", "rnn", "--dim", 6,
                 "--senses", 2, "--hidden", 4, "--epochs", 2, "--out", files / "g.sams")
    assert result.returncode == 0, result.stderr
    log = [r for r in result.stderr.splitlines() if r.startswith("epoch")]
    assert len(log) == 2 and log[0].split()[2] == "loss" and log[1].split()[4] == "margin-satisfied"

    pairs = files / "pairs.tsv"
    pairs.write_text("1\tthe river bank\tthe bank of the river\n"
                     "0\tthe river bank\tthe banker counted money\n"
                     "1\ta clerk deposited cash\tcash deposited by a clerk\n"
                     "0\ta clerk deposited cash\tthe otter swam along\n")
    tuned = files / "p.sams"
    result = run("train-paraphrase", "--pairs", pairs, "--init", files / "g.sams", "--cost", "l2",
                 "--mode", "hard", "--pooling", "--ensemble", "--epochs", 2, "--validation", 0.25,
                 "--out", tuned)
    assert result.returncode == 0, result.stderr
    report = run("eval-paraphrase", "--model", tuned, "--data", pairs, "--ensemble")
    assert report.returncode == 0, report.stderr
    rows = [r.split("\t") for r in report.stdout.strip().splitlines()]
    assert [r[0] for r in rows] == ["accuracy", "f1"]
    assert all(r[2] == "4" for r in rows)


def test_exit_codes(files):
    assert run("train-generic", "--out", files / "x.sams").returncode == 1
    assert run("train-generic", "--corpus", files / "corpus.txt", "--encoder", "cnn",
               "--out", files / "x.sams").returncode == 1
    assert run("train-generic", "--corpus", files / "missing.txt", "--encoder", "rnn",
               "--out", files / "x.sams").returncode == 2
    assert run("eval-similarity", "--model", files / "missing.sams", "--data",
               files / "sim.tsv").returncode == 2
    model = train(files, "m.sams", "--epochs", 0)
    (files / "bad.tsv").write_text("bank\triver\tno marker here\tthe <t>river</t>\t3\n")
    bad = run("eval-similarity", "--model", model, "--data", files / "bad.tsv")
    assert bad.returncode == 2 and "FormatError" in bad.stderr
    assert run("neighbors", "--model", model, "--word", "zebra").returncode == 2
    assert run("eval-paraphrase", "--model", model, "--data", files / "sim.tsv").returncode == 2
