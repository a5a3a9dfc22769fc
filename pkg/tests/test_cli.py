import json
import subprocess
import sys

import pytest

from basketmine.cli import main
from basketmine.dataset import group_into_baskets, read_pos_csv
from basketmine.mining import build_index

from conftest import HEADER_LINE, gender_records, record, table2_records
from oracles import pair_counts


def run(*argv):
    return main([str(a) for a in argv])


def test_profile_fig1(write_corpus, tmp_path):
    path = write_corpus(gender_records())
    assert run("profile", "--input", path, "--out-dir", tmp_path / "out") == 0
    lines = (tmp_path / "out" / "profile_gender.csv").read_text().splitlines()
    assert lines == ["value;count;percent", "F;8452;84.52", "M;1548;15.48"]
    assert (tmp_path / "out" / "frequency.csv").read_text().splitlines()[1] == "I001;Item I001;10000;100.00"


def test_missing_input_names_path(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    assert run("profile", "--input", missing, "--out-dir", tmp_path) == 1
    assert str(missing) in capsys.readouterr().err


def test_empty_corpus_is_data_error(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER_LINE)
    assert run("profile", "--input", path, "--out-dir", tmp_path) == 2
    assert "no baskets" in capsys.readouterr().err


def test_malformed_csv_is_data_error(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER_LINE + "R1,yesterday,F,30,A,a,c,1,1\n")
    assert run("mine", "--input", path, "--out-dir", tmp_path) == 2
    assert "line 2" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["mine", "--bogus"], ["frobnicate"], ["mine", "--max-len", "x"]])
def test_argument_errors_exit_one(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1


def test_missing_input_flag_exits_one():
    assert run("mine") == 1


def _four_baskets():
    return [record("R1", "A"), record("R1", "B"), record("R2", "A"), record("R2", "B"),
            record("R3", "A"), record("R4", "B")]


def test_mine_four_baskets(write_corpus, tmp_path):
    path = write_corpus(_four_baskets())
    assert run("mine", "--input", path, "--out-dir", tmp_path, "--min-support", 2, "--max-len", 2) == 0
    assert (tmp_path / "itemsets.csv").read_text().splitlines() == ["items;count", "A;3", "B;3", "A|B;2"]


def test_mine_threshold_above_n_header_only(write_corpus, tmp_path):
    path = write_corpus(_four_baskets())
    assert run("mine", "--input", path, "--out-dir", tmp_path, "--min-support", 5) == 0
    assert (tmp_path / "itemsets.csv").read_text() == "items;count\n"


def test_mine_oracle_flag_identical(write_corpus, tmp_path):
    recs = [record(f"R{r}", f"I{(r * k) % 9}") for r in range(60) for k in (1, 2, 5)]
    path = write_corpus(recs)
    run("mine", "--input", path, "--out-dir", tmp_path / "a", "--min-support", 3)
    run("mine", "--input", path, "--out-dir", tmp_path / "b", "--min-support", 3, "--oracle")
    a = (tmp_path / "a" / "itemsets.csv").read_bytes()
    assert a == (tmp_path / "b" / "itemsets.csv").read_bytes()
    assert len(a.splitlines()) > 10


def test_rules_table2_row(write_corpus, tmp_path):
    path = write_corpus(table2_records())
    code = run("rules", "--input", path, "--out-dir", tmp_path, "--min-support", 3, "--max-len", 2)
    assert code == 0
    rows = (tmp_path / "rules.csv").read_text().splitlines()
    (row,) = [r for r in rows if r.startswith("JT_FRONTIER;CHOKAN_SPORTS;")]
    assert ";6;0.206;50;486.5;" in row
    for measure in ("support", "confidence", "lift", "j_measure", "mdl"):
        assert (tmp_path / f"rules_top_{measure}.csv").exists()


def test_rules_rejects_confidence_above_one(write_corpus, tmp_path, capsys):
    path = write_corpus(_four_baskets())
    assert run("rules", "--input", path, "--out-dir", tmp_path, "--min-confidence", 1.01) == 1
    assert "confidence" in capsys.readouterr().err


def test_rules_virtual_never_consequent(write_corpus, tmp_path):
    path = write_corpus(table2_records())
    run("rules", "--input", path, "--out-dir", tmp_path, "--min-support", 3,
        "--virtual", "gender,dow,age", "--min-confidence", 0.01)
    rows = (tmp_path / "rules.csv").read_text().splitlines()[1:]
    assert any("@dow=SAT" in r.split(";")[1] for r in rows)
    assert not any(r.startswith("@") for r in rows)


def test_bad_virtual_attribute(write_corpus, tmp_path):
    path = write_corpus(_four_baskets())
    assert run("rules", "--input", path, "--out-dir", tmp_path, "--virtual", "store") == 1


def _synth_spec(tmp_path, **extra):
    spec = {"n_baskets": 3000, "n_items": 8, "base_probability": [0, 0.05, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1],
            "planted": [{"antecedent": [0], "consequent": 1, "target_confidence": 0.8,
                         "antecedent_probability": 0.1}], "seed": 3}
    spec.update(extra)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return path


def test_synth_and_seed_override(tmp_path):
    spec = _synth_spec(tmp_path)
    assert run("synth", "--spec", spec, "--out-dir", tmp_path / "a") == 0
    assert run("synth", "--spec", spec, "--out-dir", tmp_path / "b") == 0
    assert run("synth", "--spec", spec, "--out-dir", tmp_path / "c", "--seed", 4) == 0
    a = (tmp_path / "a" / "corpus.csv").read_bytes()
    assert a == (tmp_path / "b" / "corpus.csv").read_bytes()
    assert a != (tmp_path / "c" / "corpus.csv").read_bytes()
    assert (tmp_path / "a" / "ground_truth.csv").read_text().splitlines()[1] == "I000;I001;0.8;0.1"


def test_synth_requires_valid_spec(tmp_path):
    assert run("synth", "--out-dir", tmp_path) == 1
    bad = _synth_spec(tmp_path, n_items=0)
    assert run("synth", "--spec", bad, "--out-dir", tmp_path) == 1


def test_validate_planted_and_delta_one(tmp_path):
    run("synth", "--spec", _synth_spec(tmp_path), "--out-dir", tmp_path)
    corpus = tmp_path / "corpus.csv"
    args = ["validate", "--input", corpus, "--min-support", 20, "--max-len", 2,
            "--min-confidence", 0.05, "--seed", 5]
    assert run(*args, "--out-dir", tmp_path / "v", "--delta", 1.0) == 0
    rows = (tmp_path / "v" / "validation.csv").read_text().splitlines()
    assert rows[0].endswith(";holdout_confidence;drop;stable")
    assert all(not r.endswith(";unstable") for r in rows[1:])
    triaged = (tmp_path / "v" / "triage.csv").read_text().splitlines()
    assert len(triaged) == len(rows)


def test_validate_known_and_annotation_files(tmp_path):
    run("synth", "--spec", _synth_spec(tmp_path), "--out-dir", tmp_path)
    (tmp_path / "known.txt").write_text("I000 => I001\n")
    (tmp_path / "notes.txt").write_text("I000 => I001 = actionable  # planted\n")
    base = ["validate", "--input", tmp_path / "corpus.csv", "--min-support", 20, "--max-len", 2,
            "--seed", 5, "--out-dir", tmp_path]
    assert run(*base, "--known", tmp_path / "known.txt") == 0
    assert "I001;I000;" in (tmp_path / "triage.csv").read_text()
    assert ";trivial;known association" in (tmp_path / "triage.csv").read_text()
    assert run(*base, "--known", tmp_path / "known.txt", "--annotations", tmp_path / "notes.txt") == 0
    assert ";actionable;planted" in (tmp_path / "triage.csv").read_text()
    (tmp_path / "broken.txt").write_text("I000 I001\n")
    assert run(*base, "--known", tmp_path / "broken.txt") == 2


def test_validate_degenerate_holdout(write_corpus, tmp_path, capsys):
    path = write_corpus([record("R1", "A")])
    assert run("validate", "--input", path, "--out-dir", tmp_path) != 0
    assert "holdout" in capsys.readouterr().err


def test_validate_bad_holdout_fraction(write_corpus, tmp_path):
    path = write_corpus(_four_baskets())
    assert run("validate", "--input", path, "--out-dir", tmp_path, "--holdout", 1.0) == 1


def test_graph_empty(write_corpus, tmp_path):
    path = write_corpus([record("R1", "A"), record("R2", "B")])
    assert run("graph", "--input", path, "--out-dir", tmp_path) == 0
    dot = (tmp_path / "multiweb.dot").read_text()
    assert dot.startswith('graph "multiweb" {') and "--" not in dot
    assert (tmp_path / "multiweb_edges.csv").read_text() == "item_a;item_b;count;support_pct;lift;strength\n"


def test_graph_repeat_byte_identical_and_matches_scan(write_corpus, tmp_path):
    recs = [record(f"R{r}", f"I{(r * k) % 7}", name=f"Thing {(r * k) % 7}") for r in range(80) for k in (1, 3)]
    path = write_corpus(recs)
    run("graph", "--input", path, "--out-dir", tmp_path / "a", "--weight-metric", "count")
    run("graph", "--input", path, "--out-dir", tmp_path / "b", "--weight-metric", "count")
    for name in ("multiweb.dot", "multiweb_edges.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    dot = (tmp_path / "a" / "multiweb.dot").read_text()
    assert 'label="Thing 3"' in dot
    baskets = [b.items for b in group_into_baskets(read_pos_csv(path))]
    got = {}
    for line in (tmp_path / "a" / "multiweb_edges.csv").read_text().splitlines()[1:]:
        a, b, count, *_ = line.split(";")
        got[(a, b)] = int(count)
    assert got == pair_counts(baskets)


def test_graph_bad_thresholds(write_corpus, tmp_path):
    path = write_corpus(_four_baskets())
    assert run("graph", "--input", path, "--out-dir", tmp_path, "--t-weak", 5, "--t-strong", 1) == 1


def test_config_file_and_flag_precedence(write_corpus, tmp_path):
    path = write_corpus(_four_baskets())
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# fixture\ninput = {path}\nmin_support = 5\nmax-len = 2\nout_dir = {tmp_path / 'o'}\n")
    assert run("mine", "--config", cfg) == 0
    assert (tmp_path / "o" / "itemsets.csv").read_text() == "items;count\n"
    assert run("mine", "--config", cfg, "--min-support", 2) == 0
    assert len((tmp_path / "o" / "itemsets.csv").read_text().splitlines()) == 4


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert run("mine", "--config", cfg) == 1


@pytest.mark.parametrize("command", ["mine", "rules", "graph"])
def test_threads_do_not_change_bytes(command, tmp_path):
    run("synth", "--spec", _synth_spec(tmp_path), "--out-dir", tmp_path)
    outputs = set()
    for threads in (1, 2, 8, 8):
        out = tmp_path / f"{command}{threads}"
        assert run(command, "--input", tmp_path / "corpus.csv", "--out-dir", out,
                   "--min-support", 10, "--threads", threads, "--virtual", "gender,dow") == 0
        outputs.add(tuple(p.read_bytes() for p in sorted(out.iterdir())))
    assert len(outputs) == 1


def test_threads_must_be_positive(write_corpus, tmp_path):
    path = write_corpus(_four_baskets())
    assert run("mine", "--input", path, "--out-dir", tmp_path, "--threads", 0) == 1


def test_module_entry_point(write_corpus, tmp_path):
    path = write_corpus(_four_baskets())
    proc = subprocess.run([sys.executable, "-m", "basketmine", "mine", "--input", str(path),
                           "--out-dir", str(tmp_path), "--min-support", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "frequent itemsets" in proc.stdout
    assert build_index(group_into_baskets(read_pos_csv(path))).n_baskets == 4
