from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import click

import desf
from automata import (
    detectability_spec,
    is_violating,
    project,
    replay_lasso,
    validate_assumptions,
)
from checks import (
    STRONG_D,
    STRONG_PERIODIC_D,
    WEAK_D,
    WEAK_PERIODIC_D,
    ensure_assumptions,
    strong_d,
    strong_periodic_d,
    weak_d,
    weak_periodic_d,
)
from detector import build_detector, check_strong_d_via_detector, check_strong_detectability
from generators import (
    gen_from_3cnf,
    gen_from_dag,
    gen_from_dfa_intersection,
    gen_random_cnf,
    gen_random_des,
    gen_random_dfa,
    gen_random_rpodes,
    make_dag,
    parse_formula,
    random_dag,
)
from models import Des, Spec
from observer import build_observer
from rpodes import check_rpodes, classify_rpodes
from schemas import GeneratedInstance, Lasso, Verdict
from unary import check_unary, is_unary
from utils.config import MAX_OBSERVER_STATES, MAX_UNARY_STEPS, check_environment
from utils.dot import des_dot, estimate_graph_dot, render
from utils.errors import ConfigError, DetectabilityError, InputError, InvariantViolation
from utils.logging import log_action, logger, setup_logging

D_PROPERTIES = (STRONG_D, WEAK_D, STRONG_PERIODIC_D, WEAK_PERIODIC_D)
DET_PROPERTIES = ("strong-det", "weak-det", "strong-periodic-det", "weak-periodic-det")
ENGINES = ("auto", "general", "detector", "unary", "rpo")

GENERAL_CHECKS = {
    STRONG_D: strong_d,
    STRONG_PERIODIC_D: strong_periodic_d,
    WEAK_D: weak_d,
    WEAK_PERIODIC_D: weak_periodic_d,
}


def select_engine(des: Des) -> str:
    if not des.alphabet.observable:
        return "general"
    if is_unary(des):
        return "unary"
    if classify_rpodes(des).is_rpo:
        return "rpo"
    return "general"


def decide(
    des: Des,
    spec: Spec,
    property_name: str,
    engine: str = "auto",
    max_observer_states: int = MAX_OBSERVER_STATES,
    max_unary_steps: int = MAX_UNARY_STEPS,
    force: bool = False,
) -> Verdict:
    """
    Decide one property with the requested engine. Plain detectability
    properties (*-det) are checked against the all-distinct-pairs specification.
    """
    plain = property_name in DET_PROPERTIES
    if not plain and property_name not in D_PROPERTIES:
        raise InputError(f"Unknown property: {property_name}")
    base = property_name.replace("-det", "-d") if plain else property_name
    if plain:
        spec = detectability_spec(des)
    try:
        spec.validate_against(des)
    except ValueError as e:
        raise InputError(str(e))
    if engine == "auto":
        engine = select_engine(des)
    ensure_assumptions(des, force)

    if engine == "general":
        verdict = GENERAL_CHECKS[base](des, spec, max_observer_states, force)
    elif engine == "detector":
        if property_name == "strong-det":
            verdict = check_strong_detectability(des, periodic=False)
        elif base == STRONG_D:
            verdict = check_strong_d_via_detector(des, spec)
        else:
            raise InputError("The detector engine decides strong-d and strong-det only")
    elif engine == "unary":
        verdict = check_unary(des, spec, base, max_unary_steps)
    elif engine == "rpo":
        verdict = check_rpodes(des, spec, base, max_observer_states)
    else:
        raise InputError(f"Unknown engine: {engine}")
    return verdict.model_copy(update={"property_name": property_name})


def format_verdict(verdict: Verdict, source: Optional[str] = None) -> str:
    lines = [f"file: {source}"] if source else []
    lines.append(f"property: {verdict.property_name}")
    lines.append(f"engine: {verdict.engine}")
    lines.append(f"verdict: {'holds' if verdict.holds else 'fails'}")
    if verdict.bound_n is not None:
        lines.append(f"bound n: {verdict.bound_n}")
    if verdict.witness is not None:
        lines.append(f"witness: {verdict.witness.render()}")
    if verdict.witness_position is not None:
        lines.append(f"witness position: {verdict.witness_position}")
    lines.extend(f"note: {note}" for note in verdict.notes)
    return "\n".join(lines)


def format_replay(des: Des, spec: Spec, lasso: Lasso, repetitions: int) -> str:
    word = lasso.word(repetitions)
    trace = replay_lasso(des, lasso, repetitions)
    lines = []
    for position, estimate in enumerate(trace):
        event = word[position - 1] if position else "-"
        label = "{" + ",".join(des.canonical(estimate)) + "}"
        status = "violating" if is_violating(estimate, spec) else "free"
        lines.append(f"{position} {event} {label} {status}")
    return "\n".join(lines)


def _parse_lasso(text: str) -> Lasso:
    try:
        return Lasso.parse(text)
    except ValueError as e:
        raise InputError(f"Malformed witness {text!r}: {e}")


def _emit_instance(instance: GeneratedInstance, output: Optional[str]) -> None:
    comments = tuple(f"{key}: {value}" for key, value in sorted(instance.metadata.items()))
    text = desf.serialize(instance.des, instance.spec, ("generated by ddetect",) + comments)
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        click.echo(text, nl=False)


class DetectabilityCommands:
    def __init__(self):
        self.group = click.Group(
            name="ddetect",
            help="Verify D-detectability of partially observed discrete event systems.",
            params=[
                click.Option(
                    ["--log-level"],
                    envvar="DDETECT_LOG_LEVEL",
                    default=None,
                    help="Logging level (defaults to DDETECT_LOG_LEVEL or WARNING)",
                )
            ],
            callback=self._configure,
        )
        self._setup_commands()
        self._setup_generators()

    def _configure(self, log_level: Optional[str]) -> None:
        setup_logging(log_level)
        try:
            check_environment()
        except ConfigError as e:
            self._fail(click.get_current_context(), "configure", e)

    def _fail(self, ctx: click.Context, action: str, error: Exception) -> None:
        if not isinstance(error, DetectabilityError):
            logger.exception(f"Unexpected error in {action}")
            error = InvariantViolation(f"Internal error: {error}")
        log_action(action, "failure", error.detail)
        click.echo(f"error: {error.detail}", err=True)
        ctx.exit(error.exit_code)

    def _setup_commands(self):
        @self.group.command("check")
        @click.argument("files", nargs=-1, required=True, type=click.Path(dir_okay=False))
        @click.option(
            "--property",
            "property_name",
            type=click.Choice(D_PROPERTIES + DET_PROPERTIES),
            default=STRONG_D,
            show_default=True,
        )
        @click.option("--engine", type=click.Choice(ENGINES), default="auto", show_default=True)
        @click.option("--force", is_flag=True, help="Check even if the standing assumptions fail")
        @click.option("--replay", default=None, help="Replay a witness 'stem=...; cycle=...'")
        @click.option("--repetitions", type=click.IntRange(0), default=2, show_default=True)
        @click.option("--jobs", type=click.IntRange(1), default=1, show_default=True)
        @click.option(
            "--max-observer-states",
            type=click.IntRange(1),
            envvar="DDETECT_MAX_OBSERVER_STATES",
            default=MAX_OBSERVER_STATES,
            show_default=True,
        )
        @click.option(
            "--max-unary-steps",
            type=click.IntRange(1),
            envvar="DDETECT_MAX_UNARY_STEPS",
            default=MAX_UNARY_STEPS,
            show_default=True,
        )
        @click.pass_context
        def check(
            ctx,
            files,
            property_name,
            engine,
            force,
            replay,
            repetitions,
            jobs,
            max_observer_states,
            max_unary_steps,
        ):
            """Decide a (D-)detectability property for one or more DESF files."""

            def run(path: str) -> Tuple[str, int, bool]:
                try:
                    document = desf.load(path)
                    if replay is not None:
                        text = format_replay(
                            document.des, document.spec, _parse_lasso(replay), repetitions
                        )
                        log_action("check --replay", "success", path)
                        return text, 0, False
                    verdict = decide(
                        document.des,
                        document.spec,
                        property_name,
                        engine,
                        max_observer_states,
                        max_unary_steps,
                        force,
                    )
                    log_action(
                        "check",
                        "success",
                        f"{path}: {property_name} {'holds' if verdict.holds else 'fails'}",
                    )
                    source = path if len(files) > 1 else None
                    return format_verdict(verdict, source), verdict.exit_code, False
                except DetectabilityError as e:
                    log_action("check", "failure", f"{path}: {e.detail}")
                    return f"error: {e.detail}", e.exit_code, True
                except Exception as e:
                    logger.exception(f"Unexpected error while checking {path}")
                    return f"error: internal error: {e}", InvariantViolation.exit_code, True

            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(run, files))

            # results keep input order whatever the number of jobs
            for text, _, is_error in results:
                click.echo(text, err=is_error)
            ctx.exit(max(code for _, code, _ in results))

        @self.group.command("replay")
        @click.argument("file", type=click.Path(dir_okay=False))
        @click.argument("witness")
        @click.option("--repetitions", type=click.IntRange(0), default=2, show_default=True)
        @click.pass_context
        def replay(ctx, file, witness, repetitions):
            """Print the estimates along a witness lasso."""
            try:
                document = desf.load(file)
                click.echo(
                    format_replay(document.des, document.spec, _parse_lasso(witness), repetitions)
                )
                log_action("replay", "success", file)
            except Exception as e:
                self._fail(ctx, "replay", e)

        @self.group.command("observer")
        @click.argument("file", type=click.Path(dir_okay=False))
        @click.option("--dot", is_flag=True, help="Emit Graphviz DOT")
        @click.option(
            "--max-observer-states",
            type=click.IntRange(1),
            envvar="DDETECT_MAX_OBSERVER_STATES",
            default=MAX_OBSERVER_STATES,
        )
        @click.pass_context
        def observer(ctx, file, dot, max_observer_states):
            """Expand and print the observer."""
            try:
                document = desf.load(file)
                obs = build_observer(document.des, max_observer_states)
                if dot:
                    click.echo(render(estimate_graph_dot(obs, document.spec)), nl=False)
                else:
                    click.echo(self._dump(obs))
                log_action("observer", "success", f"{file}: {len(obs)} states")
            except Exception as e:
                self._fail(ctx, "observer", e)

        @self.group.command("detector")
        @click.argument("file", type=click.Path(dir_okay=False))
        @click.option("--dot", is_flag=True, help="Emit Graphviz DOT")
        @click.pass_context
        def detector(ctx, file, dot):
            """Build and print the detector."""
            try:
                document = desf.load(file)
                det = build_detector(document.des)
                if dot:
                    click.echo(render(estimate_graph_dot(det, document.spec)), nl=False)
                else:
                    click.echo(self._dump(det))
                log_action("detector", "success", f"{file}: {len(det)} states")
            except Exception as e:
                self._fail(ctx, "detector", e)

        @self.group.command("project")
        @click.argument("file", type=click.Path(dir_okay=False))
        @click.option("--dot", is_flag=True, help="Emit Graphviz DOT")
        @click.pass_context
        def project_command(ctx, file, dot):
            """Print P(G), the DES with unobservable events eliminated."""
            try:
                document = desf.load(file)
                projected = project(document.des)
                if dot:
                    click.echo(render(des_dot(projected)), nl=False)
                else:
                    click.echo(desf.serialize(projected, document.spec), nl=False)
                log_action("project", "success", file)
            except Exception as e:
                self._fail(ctx, "project", e)

        @self.group.command("classify")
        @click.argument("file", type=click.Path(dir_okay=False))
        @click.pass_context
        def classify(ctx, file):
            """Report sizes, standing assumptions and the unary/rpoDES classes."""
            try:
                des = desf.load(file).des
                report = validate_assumptions(des)
                lines = [
                    f"states: {len(des.states)}",
                    f"events: {len(des.alphabet.events)} ({len(des.alphabet.observable)} observable)",
                    f"transitions: {len(des.transitions)}",
                    f"deadlock free: {_yes(report.deadlock_free)}",
                    f"no unobservable loop: {_yes(report.no_unobservable_loop)}",
                ]
                if not report.ok:
                    lines.append(f"assumption evidence: {report.describe()}")
                lines.append(f"unary: {_yes(is_unary(des))}")
                if des.alphabet.observable:
                    rpo = classify_rpodes(des)
                    lines.append(f"rpoDES: {_yes(rpo.is_rpo)}")
                    if rpo.po_violation:
                        lines.append(f"projection cycle: {' '.join(rpo.po_violation)}")
                    if rpo.selfloop_violation:
                        state, event = rpo.selfloop_violation
                        lines.append(f"self-loop violation: {state} on {event}")
                else:
                    lines.append("rpoDES: no (no observable events)")
                click.echo("\n".join(lines))
                log_action("classify", "success", file)
            except Exception as e:
                self._fail(ctx, "classify", e)

    @staticmethod
    def _dump(automaton) -> str:
        lines = [f"states: {len(automaton.states)}"]
        lines.extend(f"  {automaton.label(state)}" for state in automaton.states)
        edges = list(automaton.edges())
        lines.append(f"transitions: {len(edges)}")
        lines.extend(
            f"  {automaton.label(source)} -{event}-> {automaton.label(target)}"
            for source, event, target in edges
        )
        return "\n".join(lines)

    def _setup_generators(self):
        @self.group.group("generate")
        def generate():
            """Generate instances from the reductions or at random (DESF on stdout)."""

        output_option = click.option("--output", "-o", default=None, help="Write to a file")

        @generate.command("dag")
        @click.option("--vertices", type=click.IntRange(2), required=True)
        @click.option("--edges", default=None, help="Edges such as '0>1 1>2' (vertex indices)")
        @click.option("--seed", type=int, default=None, help="Random edges when --edges is absent")
        @output_option
        @click.pass_context
        def generate_dag(ctx, vertices, edges, seed, output):
            """Unary instance, strongly D-detectable iff t is unreachable from s."""
            try:
                if edges is None and seed is not None:
                    dag = random_dag(seed, vertices)
                else:
                    names = [f"v{i}" for i in range(vertices)]
                    dag = make_dag(names, _parse_edges(edges or "", names), names[0], names[-1])
                _emit_instance(gen_from_dag(dag), output)
                log_action("generate dag", "success", f"{vertices} vertices")
            except Exception as e:
                self._fail(ctx, "generate dag", e)

        @generate.command("intersection")
        @click.argument("dfas", nargs=-1, type=click.Path(dir_okay=False))
        @click.option("--encode", is_flag=True, help="Encode 0 as ba and 1 as bb")
        @click.option("--random", "random_count", type=click.IntRange(1), default=None)
        @click.option("--states", type=click.IntRange(1), default=3, show_default=True)
        @click.option("--seed", type=int, default=0, show_default=True)
        @output_option
        @click.pass_context
        def generate_intersection(ctx, dfas, encode, random_count, states, seed, output):
            """Strongly periodically D-detectable iff the DFA languages do not intersect."""
            try:
                if random_count is not None:
                    automata = [
                        gen_random_dfa(seed + i, states, prefix=f"d{i}_") for i in range(random_count)
                    ]
                elif dfas:
                    automata = [desf.load(path).des for path in dfas]
                else:
                    raise InputError("Give DFA files or --random")
                _emit_instance(gen_from_dfa_intersection(automata, encode), output)
                log_action("generate intersection", "success", f"{len(automata)} DFAs")
            except Exception as e:
                self._fail(ctx, "generate intersection", e)

        @generate.command("3cnf")
        @click.option("--formula", default=None, help="Formula such as '(x|y)&(~x|y)'")
        @click.option("--variables", type=click.IntRange(1), default=3, show_default=True)
        @click.option("--clauses", type=click.IntRange(1), default=3, show_default=True)
        @click.option("--seed", type=int, default=0, show_default=True)
        @output_option
        @click.pass_context
        def generate_3cnf(ctx, formula, variables, clauses, seed, output):
            """Unary instance, strongly periodically D-detectable iff the formula is satisfiable."""
            try:
                if formula is not None:
                    phi, _ = parse_formula(formula)
                else:
                    phi = gen_random_cnf(seed, variables, clauses)
                _emit_instance(gen_from_3cnf(phi), output)
                log_action("generate 3cnf", "success", phi.render())
            except Exception as e:
                self._fail(ctx, "generate 3cnf", e)

        @generate.command("random")
        @click.option("--states", type=click.IntRange(1), default=4, show_default=True)
        @click.option("--events", type=click.IntRange(1), default=2, show_default=True)
        @click.option("--observable-fraction", type=click.FloatRange(0, 1), default=0.5)
        @click.option("--density", type=click.FloatRange(0, 1), default=0.3)
        @click.option("--rpo", is_flag=True, help="Generate an rpoDES")
        @click.option("--seed", type=int, default=0, show_default=True)
        @output_option
        @click.pass_context
        def generate_random(ctx, states, events, observable_fraction, density, rpo, seed, output):
            """Random DES satisfying the standing assumptions."""
            try:
                if rpo:
                    des = gen_random_rpodes(seed, states, events, density)
                else:
                    des = gen_random_des(seed, states, events, observable_fraction, density)
                instance = GeneratedInstance(
                    des=des,
                    spec=Spec(),
                    metadata={"reduction": "rpo" if rpo else "random", "seed": str(seed)},
                )
                _emit_instance(instance, output)
                log_action("generate random", "success", f"seed {seed}")
            except Exception as e:
                self._fail(ctx, "generate random", e)


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _parse_edges(text: str, names: List[str]) -> List[Tuple[str, str]]:
    edges = []
    for token in text.replace(",", " ").split():
        left, sep, right = token.partition(">")
        if not sep:
            raise InputError(f"Malformed edge {token!r}; expected 'p>r'")
        try:
            edges.append((names[int(left)], names[int(right)]))
        except (ValueError, IndexError):
            raise InputError(f"Edge {token!r} does not name two vertex indices")
    return edges
