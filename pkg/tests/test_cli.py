import io

import pytest

from cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main


@pytest.fixture
def hexagon_args(fixtures_dir):
    return ["-H", str(fixtures_dir / "hexagon_H.words"), "-K", str(fixtures_dir / "hexagon_K.words")]


def test_meet_prints_graph_and_rank(capsys, hexagon_args):
    assert main(["meet", *hexagon_args]) == EXIT_OK
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == "alphabet: a b c"
    assert lines[1] == "basepoint 0"
    assert sum(1 for line in lines if line.startswith("edge ")) == 6
    assert lines[-1] == "rank 1"


def test_meet_output_feeds_rank(capsys, hexagon_args, tmp_path, monkeypatch):
    main(["meet", *hexagon_args])
    meet_text = capsys.readouterr().out
    monkeypatch.setattr("sys.stdin", io.StringIO(meet_text))
    assert main(["rank", "-"]) == EXIT_OK
    assert capsys.readouterr().out == "rank 1\n"


def test_rank_of_subgroup_file(capsys, fixtures_dir):
    assert main(["rank", "-H", str(fixtures_dir / "k23_H.words")]) == EXIT_OK
    assert capsys.readouterr().out == "rank 4\n"


def test_join_and_pushout(capsys, hexagon_args):
    assert main(["join", *hexagon_args]) == EXIT_OK
    assert capsys.readouterr().out.endswith("rank 2\n")
    assert main(["pushout", *hexagon_args]) == EXIT_OK
    assert capsys.readouterr().out.endswith("rank 3\n")


def test_normalize(capsys, hexagon_args):
    assert main(["normalize", *hexagon_args]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("conjugator 1\n# H\nalphabet: a b c\n")
    assert "# K\n" in out


def test_dicks_report(capsys, hexagon_args):
    assert main(["dicks", *hexagon_args]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[summary]" in out
    assert "abc_ok=true" in out


def test_dicks_with_theta(capsys, tmp_path):
    (tmp_path / "H.words").write_text("x\ny\n")
    (tmp_path / "K.words").write_text("x\n")
    code = main(["dicks", "--theta", "-H", str(tmp_path / "H.words"), "-K", str(tmp_path / "K.words")])
    assert code == EXIT_OK
    assert "rank meet 1" in capsys.readouterr().out


def test_sig(capsys, hexagon_args):
    assert main(["sig", *hexagon_args, "--s", "1", "--t", "1"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("SIG(K_{1,1}): 6 vertices, 6 edges\n")


def test_sigma_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("edge 0 1 magenta\nedge 1 2 yellow\nedge 2 0 cyan\n"))
    assert main(["sigma", "-"]) == EXIT_OK
    assert capsys.readouterr().out == "sigma 1\nnonmonochromatic-cycle true\n"


def test_classify(capsys):
    assert main(["classify", "-h", "4", "-k", "4", "-v", "5", "-c", "4"]) == EXIT_OK
    assert capsys.readouterr().out == "NONREALIZABLE rule=R4\n"


def test_classify_marks_witnessed_profiles(capsys, tmp_path):
    db = tmp_path / "w.tsv"
    assert main(["witness", "-h", "3", "-k", "3", "-v", "4", "-c", "2", "--db", str(db)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("profile (3,3;4,2)\n")
    assert main(["classify", "-h", "3", "-k", "3", "-v", "4", "-c", "2", "--db", str(db)]) == EXIT_OK
    assert capsys.readouterr().out.endswith(" witnessed\n")


def test_locus_csv(capsys):
    assert main(["locus", "-h", "2", "-k", "2"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "v\\c,0,1,2"


def test_witness_in_rank_two(capsys):
    assert main(["witness", "-h", "2", "-k", "2", "-v", "2", "-c", "1", "--rank2"]) == EXIT_OK
    out = capsys.readouterr().out
    generators = [line.split()[1] for line in out.splitlines() if line[:2] in ("H ", "K ")]
    assert generators and all(set(g.lower()) <= {"x", "y"} for g in generators)


def test_search_writes_report_and_run_log(capsys, tmp_path):
    log = tmp_path / "runs.csv"
    code = main(["search", "--seed", "1", "--pairs", "20", "--max-vertices", "3", "--metrics-log", str(log)])
    assert code == EXIT_OK
    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    assert lines[-1].startswith("pairs=20 ")
    assert lines[-2].startswith("# throughput=")
    assert "throughput" in captured.err
    assert log.read_text().startswith("timestamp,seed,pairs")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nonsense"],
        ["classify", "-h", "4", "--bogus"],
        ["classify", "-h", "4"],
        ["rank", "missing-file.words"],
        ["meet", "-H", "only-one.words"],
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert capsys.readouterr().err


def test_domain_errors_exit_one(capsys):
    assert main(["classify", "-h", "1", "-k", "3", "-v", "3", "-c", "0"]) == EXIT_USAGE


def test_nonrealizable_witness_request_exits_one(capsys):
    assert main(["witness", "-h", "4", "-k", "4", "-v", "5", "-c", "4"]) == EXIT_USAGE


def test_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_USAGE, EXIT_VIOLATION}) == 3


def test_search_without_timing_is_byte_identical(capsys, tmp_path):
    argv = ["search", "--seed", "4", "--pairs", "15", "--max-vertices", "3", "--no-timing",
            "--metrics-log", str(tmp_path / "runs.csv")]
    assert main(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out == first
    assert "# throughput" not in first
