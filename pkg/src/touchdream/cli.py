"""Command-line entry points tying the modules into reproducible workflows.

Subcommands:
  gen-data    synthesize a demonstration dataset and write it to disk
  train       fit a policy variant on a stored dataset
  eval        roll dreamed forces/latents against a recorded episode
  lbc-check   verify the locomotion kernels against bundled hand-checked cases

Exit codes: 0 success, 1 domain failure, 2 usage error. Every subcommand is
deterministic given its arguments and seed. If --out is omitted, the
TOUCHDREAM_OUT environment variable provides the default output root.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .data import Dataset
from .lbc import LBCError, check_sampler_bounds, run_case_file
from .policy import VARIANT_NAMES, PolicyConfig
from .schema import ActionSchema, ModalitySchema, SchemaError
from .storage import StorageError, read_dataset, write_dataset
from .synthetic import SyntheticConfig, generate_synthetic_dataset
from .tactile import make_teacher
from .training import (
    TEACHER_MODES,
    TrainingConfig,
    TrainingError,
    apply_config_overrides,
    load_checkpoint,
    parse_config_overrides,
    read_checkpoint_manifest,
    train,
)
from .evaluation import (
    ablation_report,
    export_latent_heatmap,
    rollout_dream_trace,
    write_trace_csv,
)

OUT_ROOT_ENV = "TOUCHDREAM_OUT"
MAX_HEATMAP_FRAMES = 8


class UsageError(ValueError):
    """Bad arguments or malformed inputs detected before any work starts."""


def _resolve_out(out: str | None, subcommand: str) -> Path:
    if out is not None:
        return Path(out)
    root = os.environ.get(OUT_ROOT_ENV)
    if root:
        return Path(root) / subcommand
    raise UsageError(f"--out is required (or set {OUT_ROOT_ENV} as a default output root)")


def _parse_mix(pairs: list[str] | None) -> dict[str, float] | None:
    if not pairs:
        return None
    mix: dict[str, float] = {}
    for pair in pairs:
        name, sep, weight = pair.partition("=")
        if not sep or not name:
            raise UsageError(f"bad --mix entry {pair!r}; expected name=weight")
        try:
            mix[name] = float(weight)
        except ValueError:
            raise UsageError(f"bad --mix weight in {pair!r}") from None
    return mix


def cmd_gen_data(args: argparse.Namespace) -> int:
    if args.episodes < 1:
        raise UsageError(f"--episodes must be >= 1, got {args.episodes}")
    out = _resolve_out(args.out, "gen-data")
    schema = ModalitySchema(image_size=args.image_size)
    config = SyntheticConfig(
        schema=schema, action_schema=ActionSchema(), episode_length=args.episode_length
    )
    dataset = generate_synthetic_dataset(
        args.episodes, seed=args.seed, scenario_mix=_parse_mix(args.mix), config=config
    )
    write_dataset(dataset, out)

    scenarios: dict[str, int] = {}
    for ep in dataset.episodes:
        scenarios[ep.meta.scenario] = scenarios.get(ep.meta.scenario, 0) + 1
    steps = sum(ep.length for ep in dataset.episodes)
    print(f"wrote {len(dataset.episodes)} episodes ({steps} steps) to {out}")
    for name in sorted(scenarios):
        print(f"  {name}: {scenarios[name]} episodes")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    out = _resolve_out(args.out, "train")
    dataset = read_dataset(args.dataset)
    policy_cfg = PolicyConfig(
        schema=dataset.schema, action_schema=dataset.action_schema
    ).variant(args.variant)
    config = TrainingConfig(
        policy=policy_cfg,
        steps=args.steps,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        seed=args.seed,
        teacher_mode=args.teacher_mode,
    )
    if args.config is not None:
        # config-file values win over flags; dataset/out stay flag-only paths
        try:
            overrides = parse_config_overrides(Path(args.config).read_text())
            config = apply_config_overrides(config, overrides)
        except (TrainingError, OSError) as exc:
            raise UsageError(f"config file {args.config}: {exc}") from None

    print(f"variant: {args.variant}")
    print("config: " + json.dumps(config.to_dict(), indent=2, sort_keys=True))
    state = train(config, dataset, out_dir=out)
    final = state.history[-1]
    print(
        f"trained {state.step} steps: total {final['total']:.6g} "
        f"(bc {final['bc_total']:.6g}) -> {out}"
    )
    return 0


def _schema_mismatch(checkpoint_cfg: PolicyConfig, dataset: Dataset) -> list[str]:
    diffs = []
    pairs = (
        ("modality schema", checkpoint_cfg.schema.to_dict(), dataset.schema.to_dict()),
        ("action schema", checkpoint_cfg.action_schema.to_dict(), dataset.action_schema.to_dict()),
    )
    for label, ck, ds in pairs:
        for key in sorted(set(ck) | set(ds)):
            if ck.get(key) != ds.get(key):
                diffs.append(f"{label}.{key}: checkpoint={ck.get(key)!r} dataset={ds.get(key)!r}")
    return diffs


def _collect_run_summaries(root: Path) -> dict[str, dict[str, float]]:
    runs: dict[str, dict[str, float]] = {}
    for child in sorted(root.iterdir()):
        summary_path = child / "summary.json"
        if not child.is_dir() or not summary_path.exists():
            continue
        summary = json.loads(summary_path.read_text())
        final = summary.get("final") or {}
        runs[child.name] = {
            "final_total": final.get("total"),
            "final_bc": final.get("bc_total"),
            "final_force": final.get("force"),
            "final_tactile": final.get("tactile"),
        }
    return runs


def cmd_eval(args: argparse.Namespace) -> int:
    out = _resolve_out(args.out, "eval")
    dataset = read_dataset(args.dataset)
    manifest = read_checkpoint_manifest(args.checkpoint)
    checkpoint_cfg = TrainingConfig.from_dict(manifest["config"]).policy

    diffs = _schema_mismatch(checkpoint_cfg, dataset)
    if diffs:
        print(f"refusing: checkpoint {args.checkpoint} does not match dataset {args.dataset}:",
              file=sys.stderr)
        for line in diffs:
            print(f"  {line}", file=sys.stderr)
        return 1
    if checkpoint_cfg.dream_mode != "latent":
        print(
            f"refusing: checkpoint was trained with dream_mode="
            f"{checkpoint_cfg.dream_mode!r}; dream evaluation needs 'latent'",
            file=sys.stderr,
        )
        return 1

    state = load_checkpoint(args.checkpoint)
    policy = state.policy
    policy.eval()
    # live-teacher checkpoints carry no EMA weights; report against the student
    teacher = state.teacher if state.teacher is not None else make_teacher(policy.tactile_encoder)

    dataset.with_stats()
    episode = dataset.episodes[0]
    trace = rollout_dream_trace(policy, teacher, episode, dataset.stats, stride=args.stride)

    out.mkdir(parents=True, exist_ok=True)
    trace_path = write_trace_csv(trace, out / "trace.csv")

    region = trace.region_index(args.finger)
    frame_ids = np.unique(
        np.linspace(0, len(trace.steps) - 1, min(MAX_HEATMAP_FRAMES, len(trace.steps)))
        .round()
        .astype(int)
    )
    heatmaps = []
    for i in frame_ids:
        step = int(trace.steps[i])
        for prefix, lat in (
            ("dream", trace.pred_latents[i, region]),
            ("teacher", trace.teacher_latents[i, region]),
        ):
            png, _ = export_latent_heatmap(lat, out / f"{prefix}_{args.finger}_{step:05d}")
            heatmaps.append(png.name)

    report = {
        "checkpoint": str(args.checkpoint),
        "dataset": str(args.dataset),
        "episode": episode.meta.episode_id,
        "stride": args.stride,
        "num_steps": int(len(trace.steps)),
        "force_mae": trace.force_mae_per_hand,
        "force_rms": float(np.sqrt(np.mean(trace.true_force**2))),
        "similarity_mean": float(trace.similarity.mean()),
        "similarity_min": float(trace.similarity.min()),
        "finger": args.finger,
        "finger_similarity_mean": float(trace.similarity[:, region].mean()),
        "heatmaps": heatmaps,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")

    if args.runs_root is not None:
        runs = _collect_run_summaries(Path(args.runs_root))
        (out / "ablation.tsv").write_text(ablation_report(runs, expected=VARIANT_NAMES))

    print(f"evaluated episode {episode.meta.episode_id}: {len(trace.steps)} dreamed steps")
    print(
        f"force MAE left {trace.force_mae_per_hand['left']:.6g} "
        f"right {trace.force_mae_per_hand['right']:.6g}; "
        f"similarity mean {report['similarity_mean']:.6g}"
    )
    print(f"report -> {out / 'report.json'}; trace -> {trace_path}")
    return 0


def cmd_lbc_check(args: argparse.Namespace) -> int:
    if args.cases is not None:
        text = Path(args.cases).read_text()
        source = args.cases
    else:
        text = resources.files("touchdream").joinpath("resources/lbc_cases.json").read_text()
        source = "bundled lbc_cases.json"
    payload = json.loads(text)
    cases = payload["cases"] if isinstance(payload, dict) else payload
    if not cases:
        raise UsageError(f"{source} holds no cases")

    results = run_case_file(cases)
    results.extend(check_sampler_bounds(draws=args.draws, seed=args.seed))
    failed = 0
    for res in results:
        if res.passed:
            print(f"PASS {res.name}")
        else:
            failed += 1
            print(f"FAIL {res.name}: {res.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed ({source})")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="touchdream",
        description="Touch-dreaming policy toolkit: data, training, evaluation, kernels.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen-data", help="synthesize a demonstration dataset")
    p.add_argument("--episodes", type=int, required=True, help="number of episodes (>= 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help=f"output directory (default: ${OUT_ROOT_ENV}/gen-data)")
    p.add_argument("--episode-length", type=int, default=120)
    p.add_argument("--image-size", type=int, default=64)
    p.add_argument(
        "--mix", action="append", metavar="NAME=WEIGHT",
        help="scenario mix entry, repeatable (default: equal weights)",
    )
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train a policy variant on a stored dataset")
    p.add_argument("--dataset", required=True, help="dataset directory from gen-data")
    p.add_argument("--out", help=f"run directory (default: ${OUT_ROOT_ENV}/train)")
    p.add_argument("--variant", choices=VARIANT_NAMES, default="dream-latent")
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--teacher-mode", choices=TEACHER_MODES, default="ema")
    p.add_argument(
        "--config", help="key = value override file; wins over flags, never sets paths"
    )
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="dream-vs-recorded evaluation of a checkpoint")
    p.add_argument("--checkpoint", required=True, help="checkpoint directory")
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--out", help=f"report directory (default: ${OUT_ROOT_ENV}/eval)")
    p.add_argument(
        "--finger", default="left.index",
        help="hand.region selector for the heatmap series (e.g. right.middle)",
    )
    p.add_argument("--stride", type=int, default=1, help="anchor stride for the dream rollout")
    p.add_argument(
        "--runs-root",
        help="directory of per-variant run dirs; adds an ablation.tsv comparison",
    )
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("lbc-check", help="verify locomotion kernels against stored cases")
    p.add_argument("--cases", help="JSON case file (default: bundled cases)")
    p.add_argument("--draws", type=int, default=100_000, help="sampler bound-check draws")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lbc_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage errors and --help
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, StorageError, TrainingError, LBCError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
