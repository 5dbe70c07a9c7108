"""Command-line entry point: ``threshold-cp <command> ...``."""

import argparse
import sys

from . import bounds, exact_oracle, harness
from ._rng import make_rng
from .dynamics import ProcessParams, run
from .graph_gen import GraphConfig, read_graph, sample_simple_regular, write_graph
from .isoperimetry import audit_events


def _generate(args):
    g = sample_simple_regular(GraphConfig(args.n, args.r, seed=args.seed, max_attempts=args.max_attempts))
    write_graph(g, args.out)
    print(f"wrote {args.out}: n={g.n} r={g.r} attempts={g.attempts}", file=sys.stderr)


def _simulate(args):
    g = read_graph(args.graph)
    init = harness.initial_state(args.init, g.n, make_rng(args.seed, 2))
    params = ProcessParams(p=args.p, theta=args.theta, seed=args.seed, t_max=args.t_max,
                           stop_below=args.stop_below)
    rec = run(g, init, params)
    with open(args.out, "w") as fh:
        fh.write("t,occupied,density\n")
        for t, d in enumerate(rec.densities.tolist()):
            fh.write(f"{t},{round(d * g.n)},{d!r}\n")
    status = f"extinct at t={rec.extinction_time}" if rec.extinct else f"alive after {rec.steps_run} steps"
    print(status, file=sys.stderr)


def _audit(args):
    g = read_graph(args.graph)
    rep = audit_events(g, args.m, args.eta, args.sampler, args.samples, make_rng(args.seed))
    rep.write_csv(args.out)
    for k, v in rep.summary().items():
        print(f"{k}\t{v}", file=sys.stderr)


def _oracle(args):
    with open(args.out, "w") as fh:
        if args.stat == "cross-edges":
            pmf = exact_oracle.exact_cross_edge_pmf(args.n, args.r, args.m, args.simple)
            fh.write("s,numerator,denominator,probability\n")
            for s, q in pmf.items():
                fh.write(f"{s},{q.numerator},{q.denominator},{float(q)!r}\n")
        else:
            if args.k is None:
                raise SystemExit("--k is required for events E, H, F")
            q = exact_oracle.exact_event_probability(args.n, args.r, args.m, args.k, args.stat, args.simple)
            fh.write("n,r,m,k,event,simple,numerator,denominator,probability\n")
            fh.write(f"{args.n},{args.r},{args.m},{args.k},{args.stat},{int(args.simple)},"
                     f"{q.numerator},{q.denominator},{float(q)!r}\n")


def _bounds(args):
    table = bounds.bounds_table(args.r, args.p, args.eta)
    text = table.to_text()
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        csv_path = args.out.rsplit(".", 1)[0] + ".csv" if not args.out.endswith(".csv") else args.out + ".csv"
        with open(csv_path, "w") as fh:
            fh.write(table.to_csv())


def _scan(args):
    cfg = harness.load_config(args.config)
    if args.quenched:
        cfg = harness.ScanConfig(**{**cfg.__dict__, "quenched": True})
    out = harness.run_scan(cfg, workers=args.workers, out_dir=args.out_dir)
    print(f"wrote {out.results_path} ({len(out.results)} rows) and {out.manifest_path}", file=sys.stderr)


def _report(args):
    results = harness.read_results(args.inp)
    fh = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.kind == "slope":
            harness.write_slope_csv(results, fh, args.p)
        elif args.kind == "pc":
            harness.write_pc_csv(harness.estimate_pc(results), fh)
        else:
            harness.write_gap_csv(harness.gap_report(results), fh)
    finally:
        if fh is not sys.stdout:
            fh.close()


def build_parser():
    ap = argparse.ArgumentParser(prog="threshold-cp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a uniform simple r-regular graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-attempts", type=int, default=10**6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_generate)

    p = sub.add_parser("simulate", help="run the threshold contact process on a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--theta", type=int, default=2)
    p.add_argument("--init", default="full", help="full | random:<density> | file:<path>")
    p.add_argument("--t-max", type=int, default=5000)
    p.add_argument("--stop-below", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_simulate)

    p = sub.add_parser("audit", help="sample subsets and report isoperimetric statistics")
    p.add_argument("--graph", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--sampler", choices=["uniform", "ball", "two_ball", "mixed"], default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_audit)

    p = sub.add_parser("oracle", help="exact enumeration over all pairings")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--simple", action="store_true")
    p.add_argument("--stat", choices=["cross-edges", "E", "H", "F"], required=True)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_oracle)

    p = sub.add_parser("bounds", help="evaluate the analytic constants")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_bounds)

    p = sub.add_parser("scan", help="run a replica scan from a key=value config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--quenched", action="store_true")
    p.set_defaults(func=_scan)

    p = sub.add_parser("report", help="analyse a scan's results.csv")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--kind", choices=["slope", "pc", "gap"], required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_report)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
