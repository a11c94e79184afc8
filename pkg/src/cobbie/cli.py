"""Command-line entry point: ``cobbie <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 provider error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .agent import (
    SYSTEM_ERROR,
    HttpChatProvider,
    ProviderError,
    ReplayProvider,
    run_adaptive,
    run_static,
)
from .bench import (
    TEST,
    TRAIN,
    MissingModel,
    SchemaError,
    build_report,
    collect_records,
    emit_report,
    load_dataset,
    load_matrix,
    run_matrix,
    stratified_split,
)
from .bql import ExecEnvironment
from .forge import ToolRepository, run_training
from .ifc import ParseError, dump, load_model
from .retrieval import HashingEmbedder, RetrievalConfig, Retriever, index_corpus, load_index, save_index

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PROVIDER = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _provider(args):
    if args.provider == "replay":
        if not args.replay:
            raise UsageError("--provider replay needs --replay <script.jsonl>")
        return ReplayProvider.from_jsonl(args.replay)
    if not args.base_url or not args.model:
        raise UsageError("--provider http needs --base-url and --model")
    return HttpChatProvider(args.base_url, args.model, args.temperature)


def cmd_parse(args) -> int:
    g = load_model(args.file)
    sys.stdout.write(dump(g))
    for d in g.diagnostics:
        print(f"warning: {d}", file=sys.stderr)
    return EXIT_OK


def _answer(args, provider, question: str, sid: str, retriever) -> int:
    env = ExecEnvironment(load_model(args.file))
    tools = ToolRepository.load(args.tools).active if args.tools else []
    if args.static:
        rec = run_static(question, args.file, provider, env, tools, retriever, session_id=sid)
    else:
        rec = run_adaptive(question, args.file, provider, env, tools, args.max_iterations, retriever, session_id=sid)
    if args.verbose:
        print(rec.transcript(), file=sys.stderr)
    if rec.outcome == SYSTEM_ERROR:
        print(f"error: {rec.reason}", file=sys.stderr)
        return EXIT_PROVIDER
    print(rec.answer)
    return EXIT_OK


def cmd_ask(args) -> int:
    provider = _provider(args)
    retriever = None
    if args.docs:
        embedder = HashingEmbedder()
        retriever = Retriever(load_index(args.docs), embedder, RetrievalConfig())
    if not args.repl:
        if not args.question:
            raise UsageError("ask needs a question, or --repl")
        return _answer(args, provider, args.question, args.session_id, retriever)
    status, n = EXIT_OK, 0
    while True:
        try:
            line = input("question> ").strip()
        except EOFError:
            print()
            return status
        if line in ("exit", "quit"):
            return status
        if line:
            n += 1
            status = max(status, _answer(args, provider, line, f"{args.session_id}-{n}", retriever))


def cmd_index(args) -> int:
    reviewer = _provider(args) if args.review else None
    index = index_corpus(args.manifest, HashingEmbedder(), reviewer)
    save_index(index, args.out)
    print(f"indexed {len(index.chunks)} chunks, {len(index.question_parent)} reverse questions -> {args.out}")
    return EXIT_OK


def _partition(args, split: str):
    tasks = load_dataset(args.manifest)
    train, test = stratified_split(tasks, seed=args.seed)
    return (train, test) if split == TRAIN else (test, train)


def cmd_train_tools(args) -> int:
    if args.split != TRAIN:
        raise UsageError("tool training only runs on the train_dev split")
    train, test = _partition(args, TRAIN)
    repo = ToolRepository.load(args.repo) if Path(args.repo).exists() else ToolRepository()
    report = run_training(train, repo, _provider(args),
                          lambda path: ExecEnvironment(load_model(path)), {t.task_id for t in test},
                          args.max_iterations)
    repo.save(args.repo)
    print(f"created: {', '.join(report.created) or '-'}")
    print(f"debugged: {', '.join(report.debugged) or '-'}")
    print(f"pruned: {', '.join(report.pruned) or '-'}")
    for tid, phase in report.outcomes:
        print(f"{tid}\t{phase}")
    return EXIT_OK


def cmd_bench(args) -> int:
    test, _ = _partition(args, TEST)
    if not test:
        print("error: the manifest has no test split", file=sys.stderr)
        return EXIT_DATA
    spec = load_matrix(args.matrix)
    configs = spec.configs
    if args.max_iterations != 20:
        configs = [replace(c, N=args.max_iterations) for c in configs]
    records = run_matrix(test, configs, spec.providers, spec.judge, args.out, spec.aug, spec.concurrency)
    for path in emit_report(build_report(records, args.seed, spec.resamples), Path(args.out) / "report"):
        print(path)
    return EXIT_OK


def cmd_report(args) -> int:
    records = collect_records(args.records_dir)
    if not records:
        print(f"error: no records under {args.records_dir}", file=sys.stderr)
        return EXIT_DATA
    out = args.out or Path(args.records_dir) / "report"
    for path in emit_report(build_report(records, args.seed, args.resamples), out):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cobbie", description="Question answering over IFC building models by adaptive exploration.")
    p.add_argument("--provider", choices=("replay", "http"), default="replay")
    p.add_argument("--replay", help="replay script (JSONL of task_id, turn, response)")
    p.add_argument("--base-url", help="chat endpoint base URL for --provider http")
    p.add_argument("--model", help="model name for --provider http")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-iterations", type=int, default=20)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("parse", help="parse an IFC file and dump its entities")
    s.add_argument("file")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("ask", help="answer a question about a model")
    s.add_argument("file")
    s.add_argument("question", nargs="?")
    s.add_argument("--repl", action="store_true", help="read questions interactively")
    s.add_argument("--static", action="store_true", help="single-pass baseline instead of exploration")
    s.add_argument("--tools", help="tool repository (JSONL)")
    s.add_argument("--docs", help="documentation index file")
    s.add_argument("--session-id", default="q1",
                   help="session id keying the replay script (REPL questions use <id>-1, <id>-2, ...)")
    s.add_argument("-v", "--verbose", action="store_true", help="print the trace to stderr")
    s.set_defaults(func=cmd_ask)

    s = sub.add_parser("index", help="build a documentation index")
    s.add_argument("manifest", help="corpus manifest: lines of '<path> source|document'")
    s.add_argument("--out", required=True, help="index file (.json or .npz)")
    s.add_argument("--review", action="store_true", help="review chunks with the provider")
    s.set_defaults(func=cmd_index)

    s = sub.add_parser("train-tools", help="generate tools from the train_dev split")
    s.add_argument("manifest")
    s.add_argument("--split", default=TRAIN)
    s.add_argument("--repo", required=True, help="tool repository file (created or updated)")
    s.set_defaults(func=cmd_train_tools)

    s = sub.add_parser("bench", help="run the evaluation matrix on the test split")
    s.add_argument("manifest")
    s.add_argument("--matrix", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("report", help="rebuild reports from stored records")
    s.add_argument("records_dir")
    s.add_argument("--out")
    s.add_argument("--resamples", type=int, default=10_000)
    s.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_iterations < 1:
        print("error: --max-iterations must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ProviderError as e:
        print(f"provider error: {e}", file=sys.stderr)
        return EXIT_PROVIDER
    except (ParseError, SchemaError, MissingModel, FileNotFoundError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
