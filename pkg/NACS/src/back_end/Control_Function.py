### Standard Libraries
import dataclasses
import json
import os
import time
from dataclasses import dataclass, field

### External Libraries
import numpy as np
import pandas as pd

### General Modules
from NACS.src.back_end.General_Utility.Errors import (
    ConfigError,
    GeometryError,
    HorseshoeError,
)
from NACS.src.back_end.General_Utility.General_Utilities import (
    append_csv,
    format_real,
    parallel_map,
    write_csv,
    write_json,
)
from NACS.src.front_interface.terminalsize import (
    print_banner,
    print_rule,
    print_section,
)
from NACS.src.front_interface.Machine_Report import (
    machine_summary,
    print_machine_summary,
)
from NACS.src.front_interface.Run_Config_Functions import (
    CONFIG_FILE_NAME,
    write_config_file,
)
from NACS.src.front_interface.SVG_Plotter import write_svg

### Verification Modules
from NACS.src.back_end.Map_Core.Map_Sequences import HenonParams
from NACS.src.back_end.Henon_Domain.Henon_Domain_Main import (
    HenonGeometry,
    autonomous_remark,
    build_geometry,
    check_domain_inequalities,
    geometry_record,
    headline_constants,
    strip_separation_check,
)
from NACS.src.back_end.Cone_Verification.Cone_Verification_Main import (
    ConeParams,
    check_A1,
    check_A3_grid,
    derive_contraction,
    measure_contraction,
)
from NACS.src.back_end.Symbolic_Dynamics.Itinerary_Functions import (
    compute_transition_matrix,
)
from NACS.src.back_end.Symbolic_Dynamics.Strip_Refinement import StripRefiner
from NACS.src.back_end.Invariant_Set.Invariant_Set_Main import (
    LAMBDA_COLUMNS,
    brute_force_survivors,
    directed_hausdorff,
    iter_lambda_points,
)

"""
This file runs the verbs. Each cmd_* function takes a resolved RunConfig,
narrates its progress with banners on stdout, writes its files into the
output directory and returns its result together with an exit status:
0 everything passed, 1 some verification row failed.
"""

EXIT_PASS = 0
EXIT_FAIL = 1

ROW_COLUMNS = [
    "n",
    "a_n",
    "domain_pass",
    "separation_pass",
    "a1_pass",
    "a1_guarantee",
    "worst_sector_margin",
    "worst_expansion_ratio",
    "min_abs_y",
    "min_abs_x",
    "nu_v",
    "measured_contraction",
    "contraction_pass",
    "transition_matrix",
    "transitions_full",
    "error",
    "pass",
]


@dataclass
class VerificationReport:
    """Per-n rows plus the window-wide summary.

    The window-wide inequalities (tagged "all") and the contraction
    hypothesis hold for every n or for none, so they enter every row's
    pass flag; the overall verdict is then exactly "every row passes".
    """

    rows: list = field(default_factory=list)
    inequalities: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.rows) and all(row["pass"] for row in self.rows)

    @property
    def failures(self):
        return [row for row in self.inequalities if not row.passed]

    def to_dict(self):
        return {
            "summary": dict(self.summary, overall_pass=self.passed),
            "rows": self.rows,
            "failed_inequalities": [row.as_dict() for row in self.failures],
        }


def _params_of(config):
    return HenonParams(a_star=config.a_star, epsilon=config.epsilon)


def _geometry_of(config):
    """The Henon geometry; degenerate windows still get one for reporting."""
    params = _params_of(config)
    try:
        return build_geometry(params, config.n_window, config.mu_h, config.mu_v), None
    except GeometryError as error:
        return HenonGeometry(params, config.mu_h, config.mu_v), str(error)


def _matrix_text(matrix):
    return json.dumps(matrix.tolist(), separators=(",", ":"))


def _verify_slice(n, geom, cone_params, nu_v, refiner, config, domain_ok, global_ok):
    seq = geom.seq
    separation = strip_separation_check(geom, n)
    row = {
        "n": n,
        "a_n": geom.a(n),
        "domain_pass": domain_ok,
        "separation_pass": separation.inequalities.passed,
        "a1_pass": False,
        "a1_guarantee": "",
        "worst_sector_margin": np.nan,
        "worst_expansion_ratio": np.nan,
        "min_abs_y": np.nan,
        "min_abs_x": np.nan,
        "nu_v": np.nan if nu_v is None else nu_v,
        "measured_contraction": np.nan,
        "contraction_pass": False,
        "transition_matrix": "",
        "transitions_full": False,
        "error": "",
    }
    try:
        a1 = check_A1(seq, geom, n, samples=config.a1_samples)
        cone = check_A3_grid(seq, geom, n, config.grid, cone_params)
        matrix = compute_transition_matrix(geom, n)
        measured = measure_contraction(
            seq, geom, n, config.measure_depth, refiner
        ).max_ratio
    except HorseshoeError as error:
        row["error"] = "%s: %s" % (type(error).__name__, error)
    else:
        row.update(
            {
                "a1_pass": a1.passed,
                "a1_guarantee": a1.guarantee,
                "worst_sector_margin": cone.worst_sector_margin,
                "worst_expansion_ratio": cone.worst_expansion_ratio,
                "min_abs_y": cone.analytic_min_abs_y,
                "min_abs_x": cone.analytic_min_abs_x,
                "measured_contraction": measured,
                "contraction_pass": nu_v is not None and measured <= nu_v,
                "transition_matrix": _matrix_text(matrix),
                "transitions_full": bool(np.all(matrix == 1)),
            }
        )
    row["pass"] = bool(
        global_ok
        and row["domain_pass"]
        and row["separation_pass"]
        and row["a1_pass"]
        and row["worst_sector_margin"] > 0
        and row["worst_expansion_ratio"] > 1
        and row["contraction_pass"]
        and not row["error"]
    )
    return row, separation.inequalities.rows


def run_verification(config, n_window=None, quiet=True):
    """The verification pipeline over a window, without writing files.

    Parameters
    ----------
    config: RunConfig
        Resolved configuration.

    n_window: (integer, integer) or None
        Overrides config.n_window.

    quiet: bool
        Suppress the stage narration.


    Returns
    -------
    report: VerificationReport
    """

    window = tuple(n_window or config.n_window)
    config = dataclasses.replace(config, n_min=window[0], n_max=window[1])
    geom, geometry_error = _geometry_of(config)
    params = geom.params

    ### Domain inequalities
    stage = time.time()
    print_section("Domain inequalities", quiet=quiet)
    domain = check_domain_inequalities(geom, window)
    if not quiet:
        print("%d inequalities, %d failed (%.2fs)" % (
            len(domain.rows), len(domain.failures), time.time() - stage))
        print("\n")

    ### Contraction hypothesis
    cone_params = ConeParams(config.mu_h, config.mu_v, config.mu)
    try:
        nu_v = derive_contraction(cone_params).nu_v
        hypothesis_error = ""
    except HorseshoeError as error:
        nu_v, hypothesis_error = None, str(error)
    if not quiet:
        print_section("Contraction hypothesis")
        print(hypothesis_error or "nu_v = nu_h = %s" % format_real(nu_v))
        print("\n")

    ### Per time slice
    stage = time.time()
    print_section("Cone and strip checks per n", quiet=quiet)
    global_rows = [row for row in domain.rows if row.n == "all"]
    global_ok = all(row.passed for row in global_rows) and nu_v is not None
    failed_n = {row.n for row in domain.failures}
    refiner = StripRefiner(geom, geom.seq, samples=config.curve_samples)
    slices = parallel_map(
        lambda n: _verify_slice(
            n, geom, cone_params, nu_v, refiner, config,
            n not in failed_n, global_ok,
        ),
        range(window[0], window[1] + 1),
        config.threads,
    )
    rows = [row for row, _ in slices]
    inequalities = list(domain.rows)
    seen_global = set()
    for _, separation_rows in slices:
        for r in separation_rows:
            # window-wide rows repeat in every slice
            if r.n == "all":
                if r.inequality in seen_global:
                    continue
                seen_global.add(r.inequality)
            inequalities.append(r)
    if not quiet:
        print("%d time slices checked, %d failed (%.2fs)" % (
            len(rows), sum(not r["pass"] for r in rows), time.time() - stage))
        print("\n")

    ### Summary
    frame = pd.DataFrame(rows, columns=ROW_COLUMNS)
    remark = autonomous_remark(params, window)
    summary = {
        "a_star": params.a_star,
        "epsilon": params.epsilon,
        "n_window": list(window),
        "mu_h": config.mu_h,
        "mu_v": config.mu_v,
        "mu": config.mu,
        "grid": config.grid,
        "nu_v": nu_v,
        "hypothesis_error": hypothesis_error,
        "geometry_error": geometry_error or "",
        "min_sector_margin": float(frame["worst_sector_margin"].min()),
        "min_expansion_ratio": float(frame["worst_expansion_ratio"].min()),
        "min_abs_y": float(frame["min_abs_y"].min()),
        "min_abs_x": float(frame["min_abs_x"].min()),
        "max_measured_contraction": float(frame["measured_contraction"].max()),
        "transitions_full": bool(frame["transitions_full"].all()),
        "headline_constants": headline_constants(params, config.mu_h, config.mu_v),
        "autonomous_remark": remark,
    }
    report = VerificationReport(rows=rows, inequalities=inequalities, summary=summary)
    # A(n) dips below the autonomous threshold yet the horseshoe persists
    summary["remark_flag"] = bool(remark["below"] and report.passed)
    return report


def _prepare_output(config):
    os.makedirs(config.output_dir, exist_ok=True)
    write_config_file(config, os.path.join(config.output_dir, CONFIG_FILE_NAME))


def _out(config, name):
    return os.path.join(config.output_dir, name)


def _write_strips(geom, n, path, fmt):
    if fmt == "json":
        return write_json(geometry_record(geom, n), path)
    return write_svg(geom, n, path)


def _verdict(passed, what):
    print("%s: %s" % (what, "PASS" if passed else "FAIL"))
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_verify(config):
    """Run the whole verification over config.n_window and write the report.

    Returns
    -------
    report: VerificationReport

    status: integer
        0 when every row passes, 1 otherwise.
    """

    quiet = config.quiet
    print_banner("Nonautonomous Horseshoe: Verification", quiet=quiet)
    print_machine_summary(machine_summary(config.threads), quiet=quiet)
    _prepare_output(config)

    start = time.time()
    report = run_verification(config, quiet=quiet)

    written = []
    if "csv" in config.formats:
        written.append(
            write_csv(pd.DataFrame(report.rows, columns=ROW_COLUMNS),
                      _out(config, "verify_rows.csv"))
        )
        written.append(
            write_csv([row.as_dict() for row in report.inequalities],
                      _out(config, "domain_inequalities.csv"))
        )
    if "json" in config.formats:
        written.append(write_json(report.to_dict(), _out(config, "verify_report.json")))
    drawings = [fmt for fmt in ("json", "svg") if fmt in config.formats]
    if drawings:
        geom, _ = _geometry_of(config)
        for fmt in drawings:
            name = "strips_n%d.%s" % (config.lambda_n, fmt)
            try:
                written.append(_write_strips(geom, config.lambda_n, _out(config, name), fmt))
            except GeometryError as err:
                print("skipped %s: %s" % (name, err))

    if not quiet:
        print_section("Summary")
        summary = report.summary
        for key in ("nu_v", "min_sector_margin", "min_expansion_ratio",
                    "min_abs_y", "max_measured_contraction", "transitions_full"):
            print("%s: %s" % (key, summary[key]))
        print("remark_flag: %s (min A(n) = %s at n = %d, A_2 = %s)" % (
            summary["remark_flag"],
            format_real(summary["autonomous_remark"]["min_a"]),
            summary["autonomous_remark"]["argmin_n"],
            format_real(summary["autonomous_remark"]["threshold"]),
        ))
        for row in report.failures[:20]:
            print("violated: n=%s %s (margin %s)" % (
                row.n, row.inequality, format_real(row.margin)))
        for path in written:
            print("wrote %s" % path)
        print("elapsed %.2fs" % (time.time() - start))
        print_rule("=")
    return report, _verdict(report.passed, "verify")


def _precondition(config, n, depth):
    """Verification of the window a symbolic run at time n depends on."""
    report = run_verification(config, n_window=(n - depth - 1, n + depth + 1))
    if not report.passed and not config.force:
        print("verification failed on [%d, %d]; rerun with --force to continue"
              % (n - depth - 1, n + depth + 1))
        return False
    return True


def cmd_lambda(config):
    """Write the depth-limited approximation of Λ_n, streamed in word order."""

    quiet = config.quiet
    n, depth = config.lambda_n, config.depth
    print_banner("Nonautonomous Horseshoe: Invariant Set at n = %d" % n, quiet=quiet)
    _prepare_output(config)
    if not _precondition(config, n, depth):
        return None, EXIT_FAIL

    geom, _ = _geometry_of(config)
    refiner = StripRefiner(geom, geom.seq, samples=config.curve_samples)
    csv_path = _out(config, "lambda_n%d.csv" % n)
    json_path = _out(config, "lambda_n%d.json" % n)
    want_csv = "csv" in config.formats
    want_json = "json" in config.formats
    keep_points = "svg" in config.formats

    start = time.time()
    count, max_err, points = 0, 0.0, []
    if want_csv:
        write_csv(pd.DataFrame(columns=LAMBDA_COLUMNS), csv_path)
    json_handle = open(json_path, "w") if want_json else None
    try:
        if json_handle:
            json_handle.write("[\n")
        batch = []
        for word, x, y, err in iter_lambda_points(
            geom, geom.seq, n, depth, refiner=refiner, threads=config.threads
        ):
            batch.append({"word": word, "n": n, "x": x, "y": y, "err_bound": err})
            max_err = max(max_err, err)
            if keep_points:
                points.append((x, y))
            if len(batch) == 4096:
                _flush_lambda(batch, csv_path, json_handle, count, want_csv)
                count += len(batch)
                batch = []
        _flush_lambda(batch, csv_path, json_handle, count, want_csv)
        count += len(batch)
        if json_handle:
            json_handle.write("\n]\n")
    finally:
        if json_handle:
            json_handle.close()

    if keep_points:
        write_svg(geom, n, _out(config, "lambda_n%d.svg" % n), points=points,
                  title="Lambda_%d at depth %d" % (n, depth))
    if not quiet:
        print("%d points, max err_bound %s (%.2fs)" % (
            count, format_real(max_err), time.time() - start))
        print_rule("=")
    return {"count": count, "max_err_bound": max_err}, EXIT_PASS


def _flush_lambda(batch, csv_path, json_handle, written, want_csv):
    if not batch:
        return
    if want_csv:
        append_csv(pd.DataFrame(batch, columns=LAMBDA_COLUMNS), csv_path, header=False)
    if json_handle:
        body = ",\n".join(
            json.dumps({k: r[k] for k in LAMBDA_COLUMNS}) for r in batch
        )
        json_handle.write((",\n" if written else "") + body)


def read_lambda_file(path, n):
    """Points of a Λ CSV; every row must belong to time n."""
    if not os.path.exists(path):
        raise ConfigError("lambda file %s does not exist" % path)
    frame = pd.read_csv(path, dtype={"word": str}, float_precision="round_trip")
    missing = set(LAMBDA_COLUMNS) - set(frame.columns)
    if missing:
        raise ConfigError("lambda file lacks column(s) %s" % ", ".join(sorted(missing)))
    if len(frame) and not (frame["n"] == n).all():
        raise ConfigError(
            "lambda file is for n = %s but n = %d was requested"
            % (frame["n"].iloc[0], n)
        )
    return frame


def cmd_oracle(config):
    """Compare symbolic Λ_n with the orbit survivors of a lattice."""

    quiet = config.quiet
    n, k = config.lambda_n, config.oracle_k
    print_banner("Nonautonomous Horseshoe: Oracle at n = %d" % n, quiet=quiet)
    _prepare_output(config)
    depth = max(k, 1)
    if config.lambda_file:
        symbolic = read_lambda_file(config.lambda_file, n)
    else:
        symbolic = None
    if not _precondition(config, n, depth):
        return None, EXIT_FAIL

    geom, _ = _geometry_of(config)
    start = time.time()
    if symbolic is None:
        rows = list(iter_lambda_points(geom, geom.seq, n, depth, threads=config.threads))
        symbolic = pd.DataFrame(rows, columns=["word", "x", "y", "err_bound"])
    lam = symbolic[["x", "y"]].to_numpy(dtype=float)
    max_err = float(symbolic["err_bound"].max())

    print_section("Survivors", quiet=quiet)
    cloud = brute_force_survivors(
        geom, geom.seq, n, k, config.oracle_grid, refine=config.oracle_refine
    )
    if not quiet:
        print("%d survivors at window %d, spacing %s (%.2fs)" % (
            len(cloud), k, format_real(cloud.spacing), time.time() - start))

    lattice = 2.0 * geom.r / (config.oracle_grid - 1)
    to_survivors = directed_hausdorff(lam, cloud.points)
    to_symbolic = directed_hausdorff(cloud.points, lam)
    bound_to_survivors = 2.0 * lattice + max_err
    bound_to_symbolic = 2.0 * lattice + cloud.cell_radius + 2.0 * max_err
    agreement = {
        "n": n,
        "k": k,
        "grid": config.oracle_grid,
        "refine": config.oracle_refine,
        "symbolic_points": int(lam.shape[0]),
        "survivors": len(cloud),
        "max_err_bound": max_err,
        "cell_radius": cloud.cell_radius,
        "symbolic_to_survivors": to_survivors,
        "symbolic_to_survivors_bound": bound_to_survivors,
        "survivors_to_symbolic": to_symbolic,
        "survivors_to_symbolic_bound": bound_to_symbolic,
    }
    agreement["pass"] = bool(
        to_survivors <= bound_to_survivors and to_symbolic <= bound_to_symbolic
    )
    write_json(agreement, _out(config, "oracle_n%d.json" % n))
    if "csv" in config.formats:
        write_csv(cloud.to_frame(), _out(config, "survivors_n%d.csv" % n))
    if not quiet:
        for key in ("symbolic_to_survivors", "survivors_to_symbolic"):
            print("%s: %s (bound %s)" % (
                key, format_real(agreement[key]), format_real(agreement[key + "_bound"])))
        print_rule("=")
    return agreement, _verdict(agreement["pass"], "oracle")


def cmd_plot(config):
    """Draw D, the strips at time n and, given a Λ CSV, its points."""
    print_banner("Nonautonomous Horseshoe: Plot n = %d" % config.lambda_n,
                 quiet=config.quiet)
    _prepare_output(config)
    geom, _ = _geometry_of(config)
    points = None
    if config.lambda_file:
        frame = read_lambda_file(config.lambda_file, config.lambda_n)
        points = frame[["x", "y"]].to_numpy(dtype=float)
    path = write_svg(geom, config.lambda_n,
                     _out(config, "plot_n%d.svg" % config.lambda_n), points=points)
    record = write_json(geometry_record(geom, config.lambda_n),
                        _out(config, "strips_n%d.json" % config.lambda_n))
    if not config.quiet:
        print("wrote %s" % path)
        print("wrote %s" % record)
    return path, EXIT_PASS
