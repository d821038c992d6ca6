"""Command-line workflows, manifest handling, and exit codes."""

import json
import logging
import subprocess

import pytest

from marginmine import MiningConfig, cli, mine
from marginmine import io as io_mod
from marginmine.core import Channel
from marginmine.errors import FormatError
from oracles import make_planted_job

pytestmark = pytest.mark.filterwarnings("ignore::pytest.PytestUnraisableExceptionWarning")


class TestParseScalar:
    @pytest.mark.parametrize(
        "token,want",
        [
            ("true", True),
            ("False", False),
            ("none", None),
            ("null", None),
            ("3", 3),
            ("1.5", 1.5),
            ("intersect", "intersect"),
            ("'3'", "3"),
            ('"a, b"', "a, b"),
        ],
    )
    def test_coercions(self, token, want):
        assert cli._parse_scalar(token) == want


class TestParseManifest:
    def test_full_grammar(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(
            "# a comment\n"
            "\n"
            "src-meta = data/src.jsonl\n"
            "k = 8\n"
            "threshold = 1.06\n"
            "strict_topk_mean = true\n"
            "noise-token = href, sid\n"
            'out = "a, literal"\n',
            encoding="utf-8",
        )
        got = cli.parse_manifest(path)
        assert got == {
            "src_meta": "data/src.jsonl",
            "k": 8,
            "threshold": 1.06,
            "strict_topk_mean": True,
            "noise_token": ["href", "sid"],
            "out": "a, literal",
        }

    def test_line_without_equals(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("k = 4\nnot a setting\n", encoding="utf-8")
        with pytest.raises(FormatError) as ei:
            cli.parse_manifest(path)
        assert ":2:" in str(ei.value)

    def test_empty_key(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("= 4\n", encoding="utf-8")
        with pytest.raises(FormatError):
            cli.parse_manifest(path)


def write_corpus(dir_, job):
    """Serialize a MiningJob into the on-disk layout the CLI consumes."""
    dir_.mkdir(parents=True, exist_ok=True)
    paths = {
        "src_meta": dir_ / "src_meta.jsonl",
        "tgt_meta": dir_ / "tgt_meta.jsonl",
        "src_emb": dir_ / "src.emb1",
        "tgt_emb": dir_ / "tgt.emb1",
        "links": dir_ / "links.tsv",
    }
    io_mod.write_metadata(job.src, paths["src_meta"])
    io_mod.write_metadata(job.tgt, paths["tgt_meta"])
    for side, emb_key in ((job.src, "src_emb"), (job.tgt, "tgt_emb")):
        emb = job.src_emb if emb_key == "src_emb" else job.tgt_emb
        row = {id_: r for r, id_ in enumerate(emb.ids)}
        aligned = emb.vectors[[row[s.id] for s in side.sentences]]
        io_mod.write_embeddings(aligned, paths[emb_key])
    io_mod.write_doc_links(job.pairing, paths["links"])
    return {k: str(v) for k, v in paths.items()}


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    job, gold = make_planted_job(7, n_docs=2, per_side=10, dim=16, sigma=0.05)
    paths = write_corpus(tmp_path_factory.mktemp("corpus"), job)
    return job, gold, paths


def mine_flags(paths, out):
    return [
        "mine",
        "--src-meta", paths["src_meta"],
        "--tgt-meta", paths["tgt_meta"],
        "--src-emb", paths["src_emb"],
        "--tgt-emb", paths["tgt_emb"],
        "--links", paths["links"],
        "--out", str(out),
    ]


class TestMineCommand:
    def test_matches_library_call_byte_for_byte(self, corpus, tmp_path):
        job, _, paths = corpus
        out = tmp_path / "cli.tsv"
        assert cli.main(mine_flags(paths, out)) == 0
        ref = tmp_path / "lib.tsv"
        loaded = io_mod.load_job(
            paths["src_meta"], paths["tgt_meta"],
            paths["src_emb"], paths["tgt_emb"], paths["links"],
        )
        io_mod.write_pairs(mine(loaded, MiningConfig()), ref)
        assert out.read_bytes() == ref.read_bytes()
        assert len(io_mod.read_pairs(out)) > 0

    def test_huge_threshold_gives_empty_file_and_success(self, corpus, tmp_path):
        _, _, paths = corpus
        out = tmp_path / "none.tsv"
        assert cli.main(mine_flags(paths, out) + ["--threshold", "1e9"]) == 0
        assert out.read_text(encoding="utf-8") == ""
        assert len(io_mod.read_pairs(out)) == 0

    def test_output_directory_is_created(self, corpus, tmp_path):
        _, _, paths = corpus
        out = tmp_path / "deep" / "nested" / "pairs.tsv"
        assert cli.main(mine_flags(paths, out)) == 0
        assert out.is_file()

    def test_thread_count_does_not_change_bytes(self, corpus, tmp_path):
        _, _, paths = corpus
        one = tmp_path / "t1.tsv"
        eight = tmp_path / "t8.tsv"
        assert cli.main(mine_flags(paths, one) + ["--threads", "1"]) == 0
        assert cli.main(mine_flags(paths, eight) + ["--threads", "8"]) == 0
        assert one.read_bytes() == eight.read_bytes()

    def test_threads_can_come_from_environment(self, corpus, tmp_path, monkeypatch):
        _, _, paths = corpus
        out = tmp_path / "env.tsv"
        monkeypatch.setenv(cli.THREADS_ENV, "2")
        assert cli.main(mine_flags(paths, out)) == 0
        ref = tmp_path / "ref.tsv"
        monkeypatch.delenv(cli.THREADS_ENV)
        assert cli.main(mine_flags(paths, ref)) == 0
        assert out.read_bytes() == ref.read_bytes()

    def test_bad_environment_thread_count(self, corpus, tmp_path, monkeypatch):
        _, _, paths = corpus
        monkeypatch.setenv(cli.THREADS_ENV, "many")
        assert cli.main(mine_flags(paths, tmp_path / "x.tsv")) == 3

    def test_missing_required_options(self):
        assert cli.main(["mine"]) == 3

    def test_unknown_join_choice(self, corpus, tmp_path):
        _, _, paths = corpus
        assert cli.main(mine_flags(paths, tmp_path / "x.tsv") + ["--join", "bogus"]) == 3

    def test_missing_input_file(self, corpus, tmp_path):
        _, _, paths = corpus
        args = mine_flags(paths, tmp_path / "x.tsv")
        args[2] = str(tmp_path / "no_such_meta.jsonl")
        assert cli.main(args) == 2

    def test_help_names_threshold_presets(self, capsys):
        with pytest.raises(SystemExit) as ei:
            cli.main(["mine", "--help"])
        assert ei.value.code == 0
        assert "1.06/1.2/1.35" in capsys.readouterr().out


class TestManifest:
    def test_replay_is_byte_identical(self, corpus, tmp_path):
        _, _, paths = corpus
        flag_out = tmp_path / "flags.tsv"
        assert cli.main(mine_flags(paths, flag_out) + ["--join", "union", "--k", "3"]) == 0

        manifest = tmp_path / "run.ini"
        man_out = tmp_path / "manifest.tsv"
        manifest.write_text(
            "\n".join(
                [
                    f"src-meta = {paths['src_meta']}",
                    f"tgt-meta = {paths['tgt_meta']}",
                    f"src-emb = {paths['src_emb']}",
                    f"tgt-emb = {paths['tgt_emb']}",
                    f"links = {paths['links']}",
                    f"out = {man_out}",
                    "join = union",
                    "k = 3",
                ]
            )
            + "\n",
            encoding="utf-8",
        )
        assert cli.main(["mine", "--manifest", str(manifest)]) == 0
        assert man_out.read_bytes() == flag_out.read_bytes()

    def test_flags_beat_manifest(self, corpus, tmp_path):
        _, _, paths = corpus
        manifest = tmp_path / "run.ini"
        manifest.write_text("join = union\n", encoding="utf-8")
        man_out = tmp_path / "man.tsv"
        args = mine_flags(paths, man_out) + ["--manifest", str(manifest), "--join", "intersect"]
        assert cli.main(args) == 0
        ref_out = tmp_path / "ref.tsv"
        assert cli.main(mine_flags(paths, ref_out) + ["--join", "intersect"]) == 0
        assert man_out.read_bytes() == ref_out.read_bytes()

    def test_unknown_key_warns_and_continues(self, corpus, tmp_path, caplog):
        _, _, paths = corpus
        manifest = tmp_path / "run.ini"
        manifest.write_text("bogus-key = 1\n", encoding="utf-8")
        out = tmp_path / "out.tsv"
        with caplog.at_level(logging.WARNING, logger="marginmine.cli"):
            code = cli.main(mine_flags(paths, out) + ["--manifest", str(manifest)])
        assert code == 0
        assert any("bogus_key" in rec.getMessage() for rec in caplog.records)


@pytest.fixture(scope="module")
def mined_tsv(corpus, tmp_path_factory):
    _, _, paths = corpus
    out = tmp_path_factory.mktemp("mined") / "pairs.tsv"
    assert cli.main(mine_flags(paths, out)) == 0
    return out


class TestEvalCommand:
    def test_report_to_stdout(self, mined_tsv, tmp_path, capsys):
        pairs = io_mod.read_pairs(mined_tsv)
        gold = tmp_path / "gold.tsv"
        gold.write_text(
            "".join(f"{s}\t{t}\n" for s, t in sorted(pairs.keys())), encoding="utf-8"
        )
        assert cli.main(["eval", "--pairs", str(mined_tsv), "--gold", str(gold)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["precision"] == 1.0
        assert report["recall"] == 1.0
        assert report["f1"] == 1.0
        assert report["n_pred"] == len(pairs)

    def test_known_miss_counts(self, mined_tsv, tmp_path, capsys):
        keys = sorted(io_mod.read_pairs(mined_tsv).keys())
        # replace one gold row so exactly one prediction is wrong
        gold_keys = keys[1:] + [(keys[0][0], "t_nowhere")]
        gold = tmp_path / "gold.tsv"
        gold.write_text(
            "".join(f"{s}\t{t}\n" for s, t in gold_keys), encoding="utf-8"
        )
        assert cli.main(["eval", "--pairs", str(mined_tsv), "--gold", str(gold)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["n_correct"] == len(keys) - 1
        assert report["n_gold"] == len(keys)

    def test_report_to_file(self, mined_tsv, tmp_path):
        pairs = io_mod.read_pairs(mined_tsv)
        gold = tmp_path / "gold.tsv"
        gold.write_text(
            "".join(f"{s}\t{t}\n" for s, t in sorted(pairs.keys())), encoding="utf-8"
        )
        out = tmp_path / "report.json"
        code = cli.main(
            ["eval", "--pairs", str(mined_tsv), "--gold", str(gold), "--out", str(out)]
        )
        assert code == 0
        assert json.loads(out.read_text(encoding="utf-8"))["f1"] == 1.0


class TestHistCommand:
    def test_single_bin_counts_everything(self, mined_tsv, capsys):
        assert cli.main(["hist", "--pairs", str(mined_tsv), "--bins", "1"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert len(lines) == 1
        assert int(lines[0].split(",")[2]) == len(io_mod.read_pairs(mined_tsv))

    def test_lo_without_hi(self, mined_tsv):
        assert cli.main(["hist", "--pairs", str(mined_tsv), "--lo", "1.0"]) == 3

    def test_svg_written(self, mined_tsv, tmp_path, capsys):
        svg = tmp_path / "hist.svg"
        code = cli.main(
            ["hist", "--pairs", str(mined_tsv), "--bins", "4",
             "--lo", "1.0", "--hi", "3.0", "--svg", str(svg)]
        )
        assert code == 0
        assert svg.read_text(encoding="utf-8").startswith("<svg")
        assert len(capsys.readouterr().out.strip().split("\n")) == 4


class TestFilterCommand:
    def test_empty_spec_list_is_identity(self, corpus, mined_tsv, tmp_path, capsys):
        _, _, paths = corpus
        specs = tmp_path / "specs.json"
        specs.write_text("[]", encoding="utf-8")
        out = tmp_path / "filtered.tsv"
        code = cli.main(
            ["filter", "--pairs", str(mined_tsv), "--specs", str(specs),
             "--src-meta", paths["src_meta"], "--tgt-meta", paths["tgt_meta"],
             "--out", str(out)]
        )
        assert code == 0
        assert out.read_bytes() == mined_tsv.read_bytes()
        n = len(io_mod.read_pairs(mined_tsv))
        assert f"kept {n} of {n} pairs" in capsys.readouterr().out

    def test_invalid_spec_json(self, corpus, mined_tsv, tmp_path):
        _, _, paths = corpus
        specs = tmp_path / "specs.json"
        specs.write_text("{not json", encoding="utf-8")
        code = cli.main(
            ["filter", "--pairs", str(mined_tsv), "--specs", str(specs),
             "--src-meta", paths["src_meta"], "--tgt-meta", paths["tgt_meta"],
             "--out", str(tmp_path / "x.tsv")]
        )
        assert code == 2

    def test_spec_must_be_a_list(self, corpus, mined_tsv, tmp_path):
        _, _, paths = corpus
        specs = tmp_path / "specs.json"
        specs.write_text('{"kind": "length_ratio"}', encoding="utf-8")
        code = cli.main(
            ["filter", "--pairs", str(mined_tsv), "--specs", str(specs),
             "--src-meta", paths["src_meta"], "--tgt-meta", paths["tgt_meta"],
             "--out", str(tmp_path / "x.tsv")]
        )
        assert code == 3

    def test_length_ratio_drop_counts_printed(self, corpus, mined_tsv, tmp_path, capsys):
        _, _, paths = corpus
        specs = tmp_path / "specs.json"
        # every oracle sentence is "src text sNNNNN" vs "tgt text tNNNNN",
        # three tokens each, so a min of 1.0 keeps everything
        specs.write_text('[{"kind": "length_ratio", "min": 1.0}]', encoding="utf-8")
        out = tmp_path / "filtered.tsv"
        code = cli.main(
            ["filter", "--pairs", str(mined_tsv), "--specs", str(specs),
             "--src-meta", paths["src_meta"], "--tgt-meta", paths["tgt_meta"],
             "--out", str(out)]
        )
        assert code == 0
        assert "length_ratio: dropped 0" in capsys.readouterr().out
        assert out.read_bytes() == mined_tsv.read_bytes()


class TestCombineCommand:
    def test_tsv_mode_votes_identical_channels_through(self, mined_tsv, tmp_path):
        out = tmp_path / "combined.tsv"
        code = cli.main(
            ["combine", "--mode", "strict", "--out", str(out),
             "--original", str(mined_tsv), "--en-xx", str(mined_tsv),
             "--xx-en", str(mined_tsv)]
        )
        assert code == 0
        voted = io_mod.read_pairs(out)
        assert voted.keys() == io_mod.read_pairs(mined_tsv).keys()
        assert all(p.channel is Channel.COMBINED for p in voted)

    def test_missing_channel_file_flag(self, mined_tsv, tmp_path):
        code = cli.main(
            ["combine", "--mode", "strict", "--out", str(tmp_path / "x.tsv"),
             "--original", str(mined_tsv), "--en-xx", str(mined_tsv)]
        )
        assert code == 2

    def test_in_process_mode_needs_translated_embeddings(self, corpus, tmp_path):
        _, _, paths = corpus
        code = cli.main(
            ["combine", "--mode", "pairwise", "--out", str(tmp_path / "x.tsv"),
             "--src-meta", paths["src_meta"], "--tgt-meta", paths["tgt_meta"],
             "--src-emb", paths["src_emb"], "--tgt-emb", paths["tgt_emb"],
             "--links", paths["links"]]
        )
        assert code == 2

    def test_in_process_mode_with_identity_translations(self, corpus, tmp_path):
        _, _, paths = corpus
        out = tmp_path / "combined.tsv"
        code = cli.main(
            ["combine", "--mode", "strict", "--out", str(out),
             "--src-meta", paths["src_meta"], "--tgt-meta", paths["tgt_meta"],
             "--src-emb", paths["src_emb"], "--tgt-emb", paths["tgt_emb"],
             "--src-emb-trans", paths["src_emb"], "--tgt-emb-trans", paths["tgt_emb"],
             "--links", paths["links"]]
        )
        assert code == 0
        assert len(io_mod.read_pairs(out)) > 0


class TestPreprocessCommand:
    def test_clean_text_passes_through(self, tmp_path, capsys):
        src = tmp_path / "src.jsonl"
        tgt = tmp_path / "tgt.jsonl"
        for path, prefix in ((src, "s"), (tgt, "t")):
            rows = [
                {"id": f"{prefix}0", "doc": "d0", "lang": "", "text": "plain words here"},
                {"id": f"{prefix}1", "doc": "d0", "lang": "", "text": "more plain words"},
            ]
            path.write_text(
                "".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8"
            )
        out_dir = tmp_path / "clean"
        code = cli.main(
            ["preprocess", "--src-meta", str(src), "--tgt-meta", str(tgt),
             "--out-dir", str(out_dir)]
        )
        assert code == 0
        from marginmine.core import Side

        got = io_mod.read_metadata(out_dir / "src_meta.jsonl", Side.SOURCE)
        assert [s.text for s in got.sentences] == ["plain words here", "more plain words"]
        assert "src: kept 2 sentences, dropped 0 empty" in capsys.readouterr().out

    def test_url_stripping_and_empty_drop(self, tmp_path, capsys):
        src = tmp_path / "src.jsonl"
        tgt = tmp_path / "tgt.jsonl"
        src_rows = [
            {"id": "s0", "doc": "d0", "lang": "", "text": "read http://a.example now"},
            {"id": "s1", "doc": "d0", "lang": "", "text": "http://only.example"},
        ]
        tgt_rows = [{"id": "t0", "doc": "e0", "lang": "", "text": "fine"}]
        src.write_text("".join(json.dumps(r) + "\n" for r in src_rows), encoding="utf-8")
        tgt.write_text("".join(json.dumps(r) + "\n" for r in tgt_rows), encoding="utf-8")
        out_dir = tmp_path / "clean"
        code = cli.main(
            ["preprocess", "--src-meta", str(src), "--tgt-meta", str(tgt),
             "--out-dir", str(out_dir)]
        )
        assert code == 0
        from marginmine.core import Side

        got = io_mod.read_metadata(out_dir / "src_meta.jsonl", Side.SOURCE)
        assert [s.text for s in got.sentences] == ["read now"]
        assert "src: kept 1 sentences, dropped 1 empty" in capsys.readouterr().out

    def test_length_filter_modes_are_exclusive(self, corpus, tmp_path):
        _, _, paths = corpus
        code = cli.main(
            ["preprocess", "--src-meta", paths["src_meta"], "--tgt-meta", paths["tgt_meta"],
             "--links", paths["links"], "--out-dir", str(tmp_path / "o"),
             "--min-src-words", "3", "--bottom-percentile", "0.2"]
        )
        assert code == 3

    def test_percentile_filter_reports_cutoffs(self, corpus, tmp_path, capsys):
        _, _, paths = corpus
        out_dir = tmp_path / "o"
        code = cli.main(
            ["preprocess", "--src-meta", paths["src_meta"], "--tgt-meta", paths["tgt_meta"],
             "--links", paths["links"], "--out-dir", str(out_dir),
             "--bottom-percentile", "0.5"]
        )
        assert code == 0
        stdout = capsys.readouterr().out
        assert "document pairs: kept 1, dropped 1" in stdout
        assert "realized cutoffs:" in stdout
        assert (out_dir / "links.tsv").is_file()

    def test_doc_filter_without_links(self, corpus, tmp_path):
        _, _, paths = corpus
        code = cli.main(
            ["preprocess", "--src-meta", paths["src_meta"], "--tgt-meta", paths["tgt_meta"],
             "--out-dir", str(tmp_path / "o"), "--min-src-words", "3"]
        )
        assert code == 3


def test_console_script_is_installed(corpus, tmp_path):
    _, _, paths = corpus
    out = tmp_path / "pairs.tsv"
    proc = subprocess.run(
        ["margin-mine", *mine_flags(paths, out), "--threads", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.is_file()


def test_module_reports_version():
    import marginmine

    assert marginmine.__version__
