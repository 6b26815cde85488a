"""Command-line interface: ingest stories, load frames, ask questions."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, TextIO

from .kb import FrameFormatError, KnowledgeBase, default_kb_path
from .lexicon import Lexicon, LexiconError, default_dict_dir, load_dictionaries
from .qa import QuestionError, answer
from .semdb import DumpError, SemanticDB, dump, load
from .semmap import ingest_text

EXIT_FOUND, EXIT_NO_FACT, EXIT_ERROR = 0, 1, 2


@dataclass
class SessionConfig:
    dict_dir: Path
    db_path: Optional[Path] = None
    kb_paths: list = field(default_factory=list)
    trace: bool = False

    def validate(self) -> None:
        if not self.dict_dir.is_dir():
            raise ValueError(f"dictionary directory not found: {self.dict_dir}")
        if self.db_path is not None and not self.db_path.parent.is_dir():
            raise ValueError(f"database directory not found: {self.db_path.parent}")


class Session:
    def __init__(self, config: SessionConfig, out: TextIO = sys.stdout,
                 err: TextIO = sys.stderr):
        config.validate()
        self.config = config
        self.out, self.err = out, err
        self.lexicon: Lexicon = load_dictionaries(config.dict_dir)
        self.db = SemanticDB()
        if config.db_path is not None and config.db_path.exists():
            self.db = load(config.db_path.read_text(encoding="utf-8"))
        self.kb = KnowledgeBase(self.lexicon)
        for path in config.kb_paths or [default_kb_path()]:
            self.kb.load_file(path)

    @property
    def trace(self):
        if not self.config.trace:
            return None
        return lambda line: print(line, file=self.err)

    def save(self) -> None:
        if self.config.db_path is not None:
            self.config.db_path.write_text(dump(self.db), encoding="utf-8")

    def ingest(self, text: str):
        report = ingest_text(text, self.db, self.lexicon, self.trace)
        for sentence, message in report.failures:
            print(f"failed: {sentence}: {message}", file=self.err)
        return report

    def ask(self, question: str) -> int:
        try:
            result = answer(question, self.db, self.kb, self.lexicon)
        except QuestionError as exc:
            print(f"error: {exc}", file=self.err)
            return EXIT_ERROR
        print(result.text, file=self.out)
        return {"found": EXIT_FOUND, "no_fact": EXIT_NO_FACT}.get(result.status, EXIT_ERROR)

    def repl(self, lines: TextIO) -> int:
        article: Optional[list] = None
        for raw in lines:
            line = raw.rstrip("\n")
            stripped = line.strip()
            if article is not None:
                if stripped:
                    article.append(line)
                    continue
                self._add_frame(article)
                article = None
                continue
            if not stripped:
                continue
            if stripped == ":quit":
                break
            if stripped == ":dump":
                self.out.write(dump(self.db))
            elif stripped.lower().startswith("frame is"):
                article = [line]
            elif stripped.endswith("?"):
                self.ask(stripped)
            else:
                self.ingest(stripped)
        if article is not None:
            self._add_frame(article)
        self.save()
        return 0

    def _add_frame(self, lines: list) -> None:
        try:
            self.kb.ingest_frame("\n".join(lines))
        except FrameFormatError as exc:
            print(f"error: {exc}", file=self.err)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="storyqa", description=__doc__)
    p.add_argument("--dict", dest="dict_dir", type=Path, default=None,
                   help="dictionary directory (default ./data/dict, else the bundled seed)")
    p.add_argument("--db", dest="db_path", type=Path, default=None,
                   help="database dump file; loaded if present, saved after changes")
    p.add_argument("--kb", dest="kb_paths", type=Path, action="append", default=[],
                   help="frame file to load (repeatable; default: bundled frames)")
    p.add_argument("--trace", action="store_true", help="print parser trace to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    ingest = sub.add_parser("ingest", help="parse and store a story file")
    ingest.add_argument("files", nargs="+", type=Path)
    ask = sub.add_parser("ask", help="answer one question")
    ask.add_argument("question")
    kb = sub.add_parser("kb", help="load frame files and list their frames")
    kb.add_argument("files", nargs="+", type=Path)
    sub.add_parser("dump", help="print the database")
    ld = sub.add_parser("load", help="replace the database with a dump file")
    ld.add_argument("file", type=Path)
    sub.add_parser("repl", help="interactive loop on standard input")
    return p


def main(argv: Optional[list] = None, out: TextIO = sys.stdout,
         err: TextIO = sys.stderr, stdin: TextIO = sys.stdin) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.trace else logging.ERROR,
                        format="warning: %(message)s", stream=err)
    config = SessionConfig(dict_dir=args.dict_dir or default_dict_dir(),
                           db_path=args.db_path, kb_paths=list(args.kb_paths),
                           trace=args.trace)
    try:
        session = Session(config, out, err)
    except (ValueError, LexiconError, DumpError, FrameFormatError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR

    try:
        if args.command == "ingest":
            for path in args.files:
                report = session.ingest(path.read_text(encoding="utf-8"))
                print(f"{path}: {report.sentences} sentence(s), {report.records} record(s), "
                      f"{len(report.failures)} failure(s)", file=out)
            session.save()
            return 0
        if args.command == "ask":
            return session.ask(args.question)
        if args.command == "kb":
            for path in args.files:
                for frame in session.kb.load_text(path.read_text(encoding="utf-8")):
                    print(f"frame {frame.head} ({frame.kind}): {len(frame.entries)} entries",
                          file=out)
            for text, warning in session.kb.warnings:
                print(f"warning: {text}: {warning}", file=err)
            return 0
        if args.command == "dump":
            out.write(dump(session.db))
            return 0
        if args.command == "load":
            session.db = load(args.file.read_text(encoding="utf-8"))
            print(f"{len(session.db)} record(s) loaded", file=out)
            session.save()
            return 0
        return session.repl(stdin)
    except (OSError, DumpError, FrameFormatError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
