"""Does a wrong curriculum hurt? A small sweep over target orders.

Orders are drawn uniformly among those with a given Kendall tau against the
true easiest-first order, from +1 (the true order) to -1 (reversed). Every
lgh run is paired with an l1 run on the same training split. The same run is
available from the shell as ``curricula tau-sweep --config ...``.
"""
import csv
import io

from curricula.harness import CurriculumMode, ExperimentConfig, run_tau_sweep, summarize, write_summary_csv
from curricula.problems import ProblemSpec

cfg = ExperimentConfig(
    name="demo-tau",
    problem=ProblemSpec("add", 3),
    train_sizes=(24,),
    replicates=2,
    curriculum=CurriculumMode("random_tau", permutations=4),
    history_length=250,
    iteration_limit=1_000_000,
    restart_limit=4,
    base_seed=7,
)

records = list(run_tau_sweep(cfg))
print(len(records), "records")

buf = io.StringIO()
write_summary_csv(summarize(records, group_by=("size", "loss", "tau")), buf)
for row in csv.DictReader(io.StringIO(buf.getvalue())):
    if row["target"] == "all":
        print(f"{row['loss']:14s} mean acc {float(row['mean_acc']):.3f}  vs l1 {float(row['diff_vs_l1']):+.3f}")
