#!/usr/bin/env python3
"""
Superposition Graph CLI
Campaigns, verification and motif tools for superpositions of Bernoulli random graphs
"""

import argparse
import asyncio
import json
import logging
import sys
import warnings
from typing import Optional

from dotenv import load_dotenv

from utils.combinatorics.overlap import expected_poly_star
from utils.errors import SupergraphError
from utils.harness.campaign import TAIL_TRANSFER_DRAWS, TAIL_TRANSFER_K, run_campaign, run_tail_transfer
from utils.harness.config import CampaignConfig
from utils.harness.outputs import emit_outputs
from utils.harness.verify import CheckResult, verify_all
from utils.layers.conditions import check_normal_conditions
from utils.limits.conditional import expected_n_f_star
from utils.motifs.motif import parse_motif

warnings.filterwarnings("ignore")

# Keep third-party output out of the console; our own modules log at WARNING.
logging.basicConfig(level=logging.WARNING, format='%(levelname)s %(name)s: %(message)s')
for logger_name in ['asyncio', 'matplotlib', 'numba', 'concurrent.futures']:
    logging.getLogger(logger_name).setLevel(logging.ERROR)


def load_config(path: str, seed: Optional[int] = None, threads: Optional[int] = None,
                out_dir: Optional[str] = None) -> CampaignConfig:
    """Config file, then SUPERGRAPH_* environment overrides, then command-line flags"""
    config = CampaignConfig.from_file(path).with_env_overrides()
    return config.with_overrides(seed=seed, threads=threads, out_dir=out_dir)


async def run_command(args) -> int:
    config = load_config(args.config, args.seed, args.threads, args.out)
    print(f"🚀 Campaign {config.name}: {config.replicates} replicates, n={config.n}, m={config.m}, "
          f"motif {config.motif.name}, regime {config.regime.value}")

    result = await run_campaign(config)
    manifest = emit_outputs(result, config.out_dir)

    if result.conditions is not None:
        mark = "✅" if result.conditions.satisfied else "⚠️ "
        failed = ", ".join(result.conditions.failed) or "none failed"
        print(f"{mark} Moment conditions ({result.conditions.regime}): {failed}")
    if result.sigma is not None:
        print(f"   sigma_F^2 = {result.sigma.value:.6g} ({result.sigma.method.value}, SE {result.sigma.std_error:.3g})")
    ks = result.diagnostics.get("ks")
    if ks is not None:
        print(f"   KS distance: {ks:.4f}")
    hill = result.diagnostics.get("hill", {}).get("estimate")
    if hill is not None:
        print(f"   Hill estimate: {hill:.4f} (k={result.diagnostics['hill']['k']})")
    transfer = result.diagnostics.get("tail_transfer")
    if transfer and "error" not in transfer:
        print(f"   Tail transfer: Hill on N_F {transfer['hill_n_f']:.4f}, on N_F* {transfer['hill_n_f_star']:.4f} "
              f"(gap {transfer['relative_gap']:.3f})")

    print(f"📁 {len(manifest['files'])} files written to {config.out_dir}")
    if result.truncated:
        print(f"⚠️  Campaign truncated after {result.completed} replicates: {result.truncated}")
        return 2
    print(f"✅ {result.completed} replicates complete")
    return 0


def verify_command(args) -> int:
    def show(check: CheckResult):
        if check.passed:
            print(f"✅ {check.name}")
        else:
            print(f"❌ {check.name}: {len(check.problems)} problem(s)")
            for problem in check.problems[:5]:
                print(f"     {problem}")

    print("🔍 Running verification battery")
    report = verify_all(instances=args.instances, seed=args.seed, hosts=args.hosts, report=show)
    print("✅ All checks passed" if report.passed else "❌ Verification failed")
    return report.exit_code


def motif_info_command(args) -> int:
    motif = parse_motif(args.motif)
    info = motif.to_dict()
    info["shape"] = motif.shape
    info["density"] = str(motif.density)
    print(json.dumps(info, indent=2))
    if not motif.is_two_connected:
        print("⚠️  Not 2-connected: counting and the limit checks reject this motif")
    return 0


def hf_command(args) -> int:
    config = load_config(args.config)
    estimate = expected_poly_star(config.motif, config.n, config.m, config.law)
    mean_star = expected_n_f_star(config.motif, config.law, truncation=config.n)
    print(f"📐 {config.motif.name}, n={config.n}, m={config.m}: {estimate.partitions} edge partitions")
    print(f"   h_F                  = {estimate.h_f:.10g}")
    print(f"   E N*_(F,P) predicted = {estimate.expected_poly_star:.10g}")
    print(f"   m * E N_F* (trunc.)  = {config.m * mean_star:.10g}")
    if config.regime.value == "normal":
        report = check_normal_conditions(config.law, config.motif)
        print(f"   normal conditions: {'satisfied' if report.satisfied else 'failed: ' + ', '.join(report.failed)}")
    return 0


def tail_transfer_command(args) -> int:
    config = load_config(args.config, args.seed)
    print(f"📈 Tail transfer for {config.motif.name}: {args.draws} single layers, k={args.k}")
    transfer = run_tail_transfer(config, draws=args.draws, k_order=args.k)
    print(f"   Hill on N_F  = {transfer.hill_n_f:.4f}")
    print(f"   Hill on N_F* = {transfer.hill_n_f_star:.4f}")
    mark = "✅" if transfer.agrees(args.tolerance) else "⚠️ "
    print(f"{mark} relative gap {transfer.relative_gap:.3f} (tolerance {args.tolerance})")
    return 0 if transfer.agrees(args.tolerance) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="supergraph", description="Superposition random graph workbench")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress from the campaign modules")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a campaign from a config file")
    run.add_argument("--config", required=True, help="YAML or JSON campaign config")
    run.add_argument("--seed", type=int, help="master seed (overrides config and SUPERGRAPH_SEED)")
    run.add_argument("--threads", type=int, help="worker processes")
    run.add_argument("--out", help="output directory")

    verify = sub.add_parser("verify", help="run the combinatorial and counting verification battery")
    verify.add_argument("--instances", type=int, default=100, help="random count-report instances")
    verify.add_argument("--hosts", type=int, default=200, help="random hosts for the flat-count oracle sweep")
    verify.add_argument("--seed", type=int, default=20240501)

    info = sub.add_parser("motif-info", help="print the invariants of a motif")
    info.add_argument("motif", help="built-in name (K3, C4, ...) or motif file")

    hf = sub.add_parser("hf", help="exact h_F and the predicted polychromatic copy count")
    hf.add_argument("--config", required=True)

    tail = sub.add_parser("tail-transfer", help="compare Hill estimates of N_F and N_F* on single layers")
    tail.add_argument("--config", required=True)
    tail.add_argument("--seed", type=int, help="master seed (overrides config and SUPERGRAPH_SEED)")
    tail.add_argument("--draws", type=int, default=TAIL_TRANSFER_DRAWS, help="single layers to simulate")
    tail.add_argument("--k", type=int, default=TAIL_TRANSFER_K, help="Hill order statistic count")
    tail.add_argument("--tolerance", type=float, default=0.15, help="largest accepted relative gap")
    return parser


async def main(argv=None) -> int:
    """Main CLI entry"""
    load_dotenv('.env.local')
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger("utils").setLevel(logging.INFO)

    try:
        if args.command == "run":
            return await run_command(args)
        if args.command == "verify":
            return verify_command(args)
        if args.command == "motif-info":
            return motif_info_command(args)
        if args.command == "hf":
            return hf_command(args)
        if args.command == "tail-transfer":
            return tail_transfer_command(args)
    except SupergraphError as e:
        print(f"❌ {type(e).__name__}: {e}")
        return 1
    except KeyboardInterrupt:
        print("\n👋 Interrupted; replicates.csv holds every completed replicate")
        return 130
    return 1


if __name__ == '__main__':
    sys.exit(asyncio.run(main()))
