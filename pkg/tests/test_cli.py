"""Command-line behavior: subcommands, exit codes, reproducible outputs."""

import json

import pytest

from mop.cli import main
from mop.defaults import desk_corpus_dir, desk_gold_mid_path, desk_gold_path


CORPUS = str(desk_corpus_dir())
GOLD = str(desk_gold_path())


class TestExtract:
    def test_desk_corpus_gold_identical(self, tmp_path, capsys):
        out = tmp_path / "mid.jsonl"
        assert main(["extract", "--corpus", CORPUS, "--out", str(out)]) == 0
        assert out.read_bytes() == desk_gold_mid_path().read_bytes()
        assert out.with_suffix(".tsv").exists()
        manifest = json.loads(
            out.with_suffix(".jsonl.manifest.json").read_text(encoding="utf-8")
        )
        assert manifest["tool"] == "mop"
        assert "corpus_sha256" in manifest

    def test_empty_directory(self, tmp_path):
        corpus = tmp_path / "empty"
        corpus.mkdir()
        out = tmp_path / "mid.jsonl"
        assert main(["extract", "--corpus", str(corpus), "--out", str(out)]) == 0
        assert out.read_text(encoding="utf-8") == ""

    def test_bad_patterns_path_exit_2(self, tmp_path):
        code = main([
            "extract", "--corpus", CORPUS,
            "--patterns", str(tmp_path / "missing.txt"),
            "--out", str(tmp_path / "mid.jsonl"),
        ])
        assert code == 2

    def test_missing_corpus_exit_2(self, tmp_path):
        assert main(["extract", "--corpus", str(tmp_path / "nope"),
                     "--out", str(tmp_path / "m.jsonl")]) == 2

    def test_repeat_runs_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        main(["extract", "--corpus", CORPUS, "--out", str(a)])
        main(["extract", "--corpus", CORPUS, "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_classifier_filter_mode(self, tmp_path):
        model = tmp_path / "model.txt"
        main(["train", "--corpus", CORPUS, "--gold", GOLD, "--algo", "gis",
              "--kind", "word", "--width", "1", "--max-iters", "100",
              "--out", str(model)])
        out = tmp_path / "mid.jsonl"
        code = main(["extract", "--corpus", CORPUS, "--filter", "classifier",
                     "--model", str(model), "--out", str(out)])
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines
        confs = [json.loads(l)["confidence"] for l in lines]
        assert all(0.5 < c <= 1.0 for c in confs)


class TestTrain:
    def test_feature_count_reproducible(self, tmp_path, capsys):
        def run(out):
            main(["train", "--corpus", CORPUS, "--gold", GOLD, "--algo", "gis",
                  "--kind", "word", "--width", "1", "--max-iters", "30",
                  "--out", str(out)])
            return capsys.readouterr().out

        # printed feature/candidate counts are stable run to run
        first = run(tmp_path / "m1.txt")
        second = run(tmp_path / "m2.txt")
        strip = lambda s: [l for l in s.splitlines() if not l.startswith("model ->")]
        assert strip(first) == strip(second)
        assert any(l.startswith("distinct features:") for l in first.splitlines())

    def test_nb_header_records_alpha(self, tmp_path):
        out = tmp_path / "nb.txt"
        main(["train", "--corpus", CORPUS, "--gold", GOLD, "--algo", "nb",
              "--kind", "word", "--width", "1", "--alpha", "0.5",
              "--out", str(out)])
        head = out.read_text(encoding="utf-8").splitlines()[:6]
        assert "model: nb" in head
        assert "alpha: 0.5" in head

    def test_candidate_count_matches_gold_cover(self, tmp_path, capsys):
        main(["train", "--corpus", CORPUS, "--gold", GOLD, "--algo", "nb",
              "--kind", "word", "--width", "1", "--out", str(tmp_path / "m.txt")])
        out = capsys.readouterr().out
        line = next(l for l in out.splitlines() if l.startswith("candidates:"))
        assert int(line.split(":")[1]) == 31

    def test_single_label_data_exit_3(self, tmp_path):
        data = tmp_path / "examples.tsv"
        data.write_text(
            "YES\tWORD\t1\ta\tcalled\tb\nYES\tWORD\t1\tc\tcalled\td\n",
            encoding="utf-8",
        )
        code = main(["train", "--data", str(data), "--algo", "nb", "--kind",
                     "word", "--width", "1", "--out", str(tmp_path / "m.txt")])
        assert code == 3


class TestEval:
    def test_desk_report(self, tmp_path, capsys):
        csv_path = tmp_path / "report.csv"
        code = main(["eval", "--corpus", CORPUS, "--gold", GOLD,
                     "--report-csv", str(csv_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "full" in out and "golden-standard" in out
        assert "records/global-F:" in out
        rows = csv_path.read_text(encoding="utf-8").splitlines()
        assert rows[0] == "section,tp,fp,fn,precision,recall,f"
        full = next(r for r in rows if r.startswith("filtering/full"))
        assert full.split(",")[1:4] == ["25", "0", "1"]

    def test_beta_flag_default_equivalence(self, capsys):
        main(["eval", "--corpus", CORPUS, "--gold", GOLD])
        default = capsys.readouterr().out
        main(["eval", "--corpus", CORPUS, "--gold", GOLD, "--beta", "1"])
        explicit = capsys.readouterr().out
        assert default == explicit

    def test_alignment_failure_exit_4(self, tmp_path):
        bad_gold = tmp_path / "gold.jsonl"
        bad_gold.write_text(
            '{"doc": "Histology", "sentence": 99, "is_emo": false}\n',
            encoding="utf-8",
        )
        assert main(["eval", "--corpus", CORPUS, "--gold", str(bad_gold)]) == 4

    def test_golden_standard_only(self, capsys):
        main(["eval", "--corpus", CORPUS, "--gold", GOLD, "--golden-standard"])
        out = capsys.readouterr().out
        assert "golden-standard" in out
        assert "\n  full" not in out


class TestSweep:
    def test_grid_rows_and_determinism(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            code = main(["sweep", "--corpus", CORPUS, "--gold", GOLD,
                         "--max-iters", "25", "--out", str(out)])
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        rows = a.read_text(encoding="utf-8").splitlines()
        assert len(rows) == 19  # header + 18 grid rows
        header = rows[0].split(",")
        assert "feature_count" in header

    def test_word_counts_exceed_pos_counts(self, tmp_path):
        out = tmp_path / "sweep.csv"
        main(["sweep", "--corpus", CORPUS, "--gold", GOLD, "--max-iters", "25",
              "--out", str(out)])
        rows = [r.split(",") for r in out.read_text(encoding="utf-8").splitlines()[1:]]
        counts = {(r[1], r[2], r[3]): int(r[4]) for r in rows}
        for algo in ("NB", "GIS", "IIS"):
            for width in ("1", "2", "3"):
                assert counts[(algo, "WORD", width)] > counts[(algo, "POS", width)]

    def test_held_out_mode(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--corpus", CORPUS, "--gold", GOLD,
                     "--mode", "held-out", "--max-iters", "25", "--out", str(out)])
        assert code == 0
        rows = out.read_text(encoding="utf-8").splitlines()
        assert all(r.startswith("held-out,") for r in rows[1:])


class TestExport:
    def test_jsonl_round_trip_bytes(self, tmp_path):
        out = tmp_path / "copy.jsonl"
        code = main(["export", "--mid", str(desk_gold_mid_path()),
                     "--format", "jsonl", "--out", str(out)])
        assert code == 0
        assert out.read_bytes() == desk_gold_mid_path().read_bytes()

    def test_tsv_view(self, tmp_path):
        out = tmp_path / "view.tsv"
        main(["export", "--mid", str(desk_gold_mid_path()), "--format", "tsv",
              "--out", str(out)])
        assert "tracheae" in out.read_text(encoding="utf-8")


class TestConfigFile:
    def test_config_file_and_flag_precedence(self, tmp_path):
        config = tmp_path / "mop.conf"
        config.write_text(f"patterns={tmp_path / 'missing.txt'}\n", encoding="utf-8")
        # config alone: missing patterns file -> resource error
        assert main(["extract", "--corpus", CORPUS, "--config", str(config),
                     "--out", str(tmp_path / "m.jsonl")]) == 2
        # CLI flag overrides the config value
        from mop.defaults import patterns_path
        assert main(["extract", "--corpus", CORPUS, "--config", str(config),
                     "--patterns", str(patterns_path()),
                     "--out", str(tmp_path / "m.jsonl")]) == 0

    def test_resources_env_fallback(self, tmp_path, monkeypatch):
        import shutil
        from mop import defaults

        root = tmp_path / "resources"
        shutil.copytree(defaults.resource_root(), root)
        monkeypatch.setenv("MOP_RESOURCES", str(root))
        assert defaults.patterns_path() == root / "patterns.txt"
        out = tmp_path / "mid.jsonl"
        assert main(["extract", "--corpus", CORPUS, "--out", str(out)]) == 0
