import io
import shutil

import pytest

from conftest import WORKSPACES
from satis.cli import main
from satis.sparql import load_query


def run(*argv, env=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


CANON = str(WORKSPACES / "canonical")
PRE = str(WORKSPACES / "preprocess")


def test_load():
    code, out, _ = run("load", "-w", CANON)
    assert code == 0
    assert out.splitlines()[1:] == ["services: 1", "fragments: 1"]


def test_load_explicit_files():
    code, out, _ = run(
        "load", "-w", "/nonexistent",
        "--ontology", f"{CANON}/ontology/domain.ttl", "--services", f"{CANON}/services/debias.ttl",
        "--fragments", f"{CANON}/fragments/debias.frag",
    )
    assert code == 0 and "fragments: 1" in out


def test_load_error_exit_2(tmp_path):
    bad = tmp_path / "bad.ttl"
    bad.write_text("@prefix x: <http://x.org/#> .\nx:a x:b\n")
    code, out, err = run("load", "--ontology", str(bad))
    assert code == 2 and out == ""
    assert err.startswith(f"{bad}:")


def test_render_debias():
    code, out, err = run("render", "-w", CANON, "--verb", "Homogenise", "--object", "Image", "--strategy", "Debiasing")
    assert code == 0
    assert out == "http://satis.example/svc#DebiasSvc\n# services: 1\n"
    assert err == ""


def test_render_unknown_verb():
    code, out, err = run("render", "-w", CANON, "--verb", "Frobnicate", "--object", "Image")
    assert code == 2 and out == ""
    assert "UnknownConcept" in err


def test_render_zero_services_exit_0(tmp_path):
    ws = tmp_path / "ws"
    shutil.copytree(CANON, ws)
    (ws / "services" / "debias.ttl").unlink()
    code, out, _ = run("render", "-w", str(ws), "--verb", "Homogenise", "--object", "Image", "--strategy", "Debiasing")
    assert (code, out) == (0, "# services: 0\n")


def test_render_stdout_only_iris():
    code, out, err = run("render", "-w", PRE, "--verb", "Preprocess", "--object", "Image", "--explain")
    lines = out.splitlines()
    assert code == 0 and lines[-1] == f"# services: {len(lines) - 1}"
    assert all(line.startswith("http://") for line in lines[:-1])
    assert "fragment preprocess [intentional]" in err


def test_render_trace_file(tmp_path):
    trace = tmp_path / "t.json"
    run("render", "-w", CANON, "--verb", "Homogenise", "--object", "Image", "--trace", str(trace))
    assert '"fragment": "debias"' in trace.read_text()


def test_depth_flag_and_env(monkeypatch):
    args = ("render", "-w", PRE, "--verb", "Preprocess", "--object", "Image")
    _, shallow, err = run(*args, "--depth", "1")
    assert shallow == "# services: 0\n" and "depth limit" in err
    monkeypatch.setenv("SATIS_DEPTH", "1")
    assert run(*args)[1] == shallow
    assert run(*args, "--depth", "3")[1] != shallow
    monkeypatch.setenv("SATIS_DEPTH", "many")
    assert run(*args)[0] == 2


def test_workspace_env(monkeypatch):
    monkeypatch.setenv("SATIS_WORKSPACE", CANON)
    assert run("load")[0] == 0


def test_source_intention():
    code, out, _ = run("render", "-w", PRE, "--verb", "Align", "--object", "Image", "--strategy", "Rotation",
                       "--source-verb", "Homogenise", "--source-object", "Image")
    assert code == 0 and out == "http://satis.example/svc#RotateSvc\n# services: 1\n"


def test_validate_ok_and_failing(tmp_path):
    code, out, _ = run("validate", "-w", PRE, "--map", f"{PRE}/fragments/preprocess.frag")
    assert code == 0 and out.startswith("image-preprocessing: ok, 6 sections, 6 paths")
    bad = tmp_path / "bad.frag"
    bad.write_text(
        "prefix : <http://satis.example/dom#>\nfragment b\n  kind: intentional\n  target: intention(Preprocess, Image)\n"
        "  body:\n    section a: start -> intention(Homogenise, Image) via anonymous\n"
        "    section b: start -> stop via anonymous\n"
    )
    code, _, err = run("validate", "-w", PRE, "--map", str(bad))
    assert code == 2 and "DeadEnd" in err and err.startswith(f"{bad}:6:")


def test_validate_turtle_map(tmp_path, preprocess):
    from satis.mapmodel import map_to_rdf
    from satis.turtle import serialize_turtle
    path = tmp_path / "m.ttl"
    path.write_text(serialize_turtle(map_to_rdf(preprocess.catalog["preprocess"].body)))
    assert run("validate", "-w", PRE, "--map", str(path))[0] == 0


def test_fragments_listing():
    code, out, _ = run("fragments", "-w", PRE, "--verb", "Align", "--object", "Image")
    assert code == 0
    assert [line.split("\t")[0] for line in out.splitlines()] == ["register", "rotate"]
    assert len(run("fragments", "-w", PRE)[1].splitlines()) == 7


def test_export_rules_reparse(tmp_path):
    code, out, _ = run("export-rules", "-w", PRE, "--out", str(tmp_path / "rules"))
    assert code == 0
    files = out.split()
    assert len(files) == 12
    for f in files:
        load_query(f)


CLI_COMMANDS = [
    ("load",),
    ("validate", "--map", f"{PRE}/fragments/preprocess.frag"),
    ("fragments",),
    ("fragments", "--verb", "Homogenise", "--object", "MRImage"),
    ("render", "--verb", "Preprocess", "--object", "Image", "--depth", "3"),
    ("render", "--verb", "Homogenise", "--object", "Image", "--strategy", "Debiasing"),
]


@pytest.mark.parametrize("argv", CLI_COMMANDS, ids=lambda a: "-".join(a[:1] + a[2:3]))
def test_deterministic_stdout(argv):
    first = run(argv[0], "-w", PRE, *argv[1:])
    second = run(argv[0], "-w", PRE, *argv[1:])
    assert first == second and first[0] == 0
