import io
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from storyqa.cli import EXIT_ERROR, EXIT_FOUND, EXIT_NO_FACT, main

from conftest import GOLDEN_SENTENCE

HERE = Path(__file__).parent


def run(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err, stdin=io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def story(tmp_path):
    path = tmp_path / "story.txt"
    path.write_text(GOLDEN_SENTENCE + "\n", encoding="utf-8")
    return path


@pytest.fixture
def db_path(tmp_path, story):
    path = tmp_path / "facts.db"
    code, out, _ = run("--db", str(path), "ingest", str(story))
    assert code == 0
    return path


def test_ingest_report(tmp_path, story):
    db = tmp_path / "facts.db"
    code, out, err = run("--db", str(db), "ingest", str(story))
    assert (code, err) == (0, "")
    assert out == f"{story}: 1 sentence(s), 8 record(s), 0 failure(s)\n"
    assert len(db.read_text().splitlines()) == 8


def test_ingest_empty_file(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    code, out, _ = run("ingest", str(empty))
    assert code == 0 and "0 sentence(s), 0 record(s), 0 failure(s)" in out


def test_ingest_unknown_word(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("The frobnicator sank.\n")
    code, out, err = run("ingest", str(bad))
    assert code == 0
    assert "0 sentence(s), 0 record(s), 1 failure(s)" in out
    assert "frobnicator" in err


@pytest.mark.parametrize("question, code, text", [
    ("Who was a mate?", EXIT_FOUND, "Mister Brown\n"),
    ("Was Brown a mate?", EXIT_FOUND, "yes\n"),
    ("Was Brown a doctor?", EXIT_NO_FACT, "no fact\n"),
    ("Who was a glorp?", EXIT_ERROR, "unknown word(s): glorp\n"),
])
def test_ask_exit_codes(db_path, question, code, text):
    got, out, _ = run("--db", str(db_path), "ask", question)
    assert (got, out) == (code, text)


def test_ask_rejects_declarative(db_path):
    code, out, err = run("--db", str(db_path), "ask", "Brown was a mate.")
    assert code == EXIT_ERROR and out == "" and err.startswith("error:")


def test_dump_and_load(tmp_path, db_path):
    code, out, _ = run("--db", str(db_path), "dump")
    assert code == 0 and out == (HERE / "golden" / "golden_story.dump").read_text()
    copy = tmp_path / "copy.db"
    code, out, _ = run("--db", str(copy), "load", str(db_path))
    assert (code, out) == (0, "8 record(s) loaded\n")
    assert copy.read_text() == db_path.read_text()


def test_load_bad_dump(tmp_path):
    bad = tmp_path / "bad.db"
    bad.write_text("nonsense\n")
    code, _, err = run("load", str(bad))
    assert code == EXIT_ERROR and "line 1" in err


def test_kb_listing(tmp_path):
    frames = tmp_path / "extra.kb"
    frames.write_text("frame is doctor\ndoctor examines a person\n")
    code, out, _ = run("kb", str(frames))
    assert (code, out) == (0, "frame doctor (noun): 1 entries\n")


def test_kb_reports_degraded_stage():
    code, out, err = run("kb", str(Path(__file__).parents[1] / "src" / "storyqa" / "data"
                                   / "kb" / "frames.kb"))
    assert code == 0
    assert "frame rob the organization (operation): 6 entries" in out
    assert "warning: to neutralize a personal" in err


def test_missing_dict_dir(tmp_path):
    code, _, err = run("--dict", str(tmp_path / "nowhere"), "dump")
    assert code == EXIT_ERROR and "dictionary directory" in err


def test_missing_story_file(tmp_path):
    code, _, err = run("ingest", str(tmp_path / "absent.txt"))
    assert code == EXIT_ERROR and err.startswith("error:")


REPL_SCRIPT = """\
Mister Brown was a mate on a ship fifteen years ago.
Who was a mate?
frame is mate
mate examines a ship

What does a mate do?
Was Brown a doctor?
:quit
Was Brown a mate?
"""

REPL_TRANSCRIPT = """\
Mister Brown
mate examines a ship
no fact
"""


def test_repl_transcript(tmp_path):
    db = tmp_path / "repl.db"
    code, out, err = run("--db", str(db), "repl", stdin=REPL_SCRIPT)
    assert (code, out, err) == (0, REPL_TRANSCRIPT, "")
    assert len(db.read_text().splitlines()) == 8


def test_repl_dump_and_bad_frame():
    code, out, err = run("repl", stdin="John went to London.\n:dump\nframe is glorp\nx\n")
    assert code == 0
    assert 'place(' in out and '"London"' in out
    assert "neither a noun nor a verb" in err


def test_trace_goes_to_stderr(tmp_path, story):
    code, out, err = run("--trace", "ingest", str(story))
    assert code == 0
    assert "group_of_subject" in err


@pytest.mark.skipif(shutil.which("storyqa") is None, reason="console script not installed")
def test_console_script(db_path):
    proc = subprocess.run(["storyqa", "--db", str(db_path), "ask", "Who was a mate?"],
                          capture_output=True, text=True)
    assert (proc.returncode, proc.stdout) == (0, "Mister Brown\n")


def test_module_entry(db_path):
    proc = subprocess.run([sys.executable, "-m", "storyqa.cli", "--db", str(db_path),
                           "ask", "Was Brown a doctor?"], capture_output=True, text=True)
    assert (proc.returncode, proc.stdout) == (1, "no fact\n")
