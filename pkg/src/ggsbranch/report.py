"""Assemble verification reports as plain dictionaries.

Every report has the top-level keys ``schema``, ``config``,
``classification``, ``checks`` and ``summary``; the JSON schema lives in
``ggsbranch/schema/report-v1.json``.  Checks appear in catalogue order,
independent of how they were computed.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from importlib import resources

from .battery import identity_battery, verify_branch_over
from .constant import (model_lcs_index, not_branch_report, q_order, stab1_derived_equals_stab2,
                       structure_crosscheck, verify_prop_products)
from .quotient import DEFAULT_DEGREE_CAP, LevelQuotient, fractal_check, index, level_transitive
from .vectors import (DefiningVector, NotApplicable, Route, check_reduction, classify, in_Eprime,
                      in_F, is_constant, r0, reduce_vector)

__all__ = ['RunConfig', 'SCHEMA_VERSION', 'load_schema', 'build_report', 'render_text', 'to_json',
           'SUITES']

SCHEMA_VERSION = 'ggsbranch-report/1'
SUITES = ('all', 'battery', 'branch', 'quotient', 'reduction', 'constant-case')

PASS, FAIL, NA, INCONCLUSIVE = 'PASS', 'FAIL', 'NOT_APPLICABLE', 'INCONCLUSIVE'


@dataclass(frozen=True)
class RunConfig:
    command: str
    p: int
    n: int
    entries: tuple[int, ...]
    depth: int = 3
    cap: int = DEFAULT_DEGREE_CAP
    format: str = 'text'
    seed: int = 0
    suite: str = 'all'

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError('depth must be at least 1')

    @property
    def vector(self) -> DefiningVector:
        return DefiningVector(self.p, self.n, self.entries)

    def to_dict(self) -> dict:
        d = asdict(self)
        d['entries'] = list(self.entries)
        return d


def load_schema() -> dict:
    text = resources.files('ggsbranch').joinpath('schema/report-v1.json').read_text()
    return json.loads(text)


def _check(anchor: str, name: str, verdict: str, depth: int | None = None, detail=None) -> dict:
    return {'anchor': anchor, 'name': name, 'verdict': verdict, 'depth': depth,
            'detail': detail if detail is not None else {}}


def _bool(ok: bool) -> str:
    return PASS if ok else FAIL


def battery_checks(e: DefiningVector, depth: int) -> list[dict]:
    out = []
    for c in identity_battery(e, depth):
        out.append(_check(c.key, c.name, c.verdict.value, c.depth, {
            'hypothesis': c.hypothesis, 'vector': c.vector, 'positions': list(c.positions),
            'reason': c.detail}))
    return out


def reduction_checks(e: DefiningVector, depth: int) -> list[dict]:
    if not in_F(e):
        return [_check('reduced_vector', 'reduction', NA, depth, {'reason': 'e not in F'})]
    data = reduce_vector(e)
    d = min(depth, 3)
    results = check_reduction(data, d)
    info = {'k': data.k, 's': data.s, 'r': data.r, 'alpha': list(data.alpha),
            'reduced': list(data.reduced.entries)}
    return [_check('reduced_vector', name, _bool(ok), d, info) for name, ok in results.items()]


def _branch_targets(route: Route, e: DefiningVector) -> list[str]:
    targets = []
    if route == Route.REGULAR_BRANCH_G1:
        targets.append('G1')
    if route in (Route.REGULAR_BRANCH_G1, Route.REGULAR_BRANCH_GAMMA3):
        targets.append('GAMMA3')
    if in_F(e) and not in_Eprime(e):
        targets.append('G2')
    return targets


def branch_checks(e: DefiningVector, depth: int, cap: int) -> list[dict]:
    route = classify(e).route
    targets = _branch_targets(route, e)
    if not targets or depth < 2:
        reason = 'no branch target for this route' if not targets else 'depth < 2'
        return [_check('main_tool', 'branch structure', NA, depth, {'reason': reason})]
    out = []
    for t in targets:
        rep = verify_branch_over(e, t, depth, cap)
        out.append(_check('main_tool', f'regular branch over {t}', rep.verdict.value, depth, rep.to_dict()))
    return out


def quotient_checks(e: DefiningVector, depth: int, cap: int) -> list[dict]:
    out = []
    q = LevelQuotient(e, depth, cap)
    if depth >= 2:
        st1 = q.stabilizer_subgroup(1)
        idx = index(q.group, st1)
        same = st1.equals(q.b_conjugates())
        out.append(_check('stabilizer_index', '|G : st_G(1)| = p^n', _bool(idx == e.m and same), depth,
                          {'index': idx, 'expected': e.m, 'generated_by_b_i': same}))
    trans = level_transitive(q)
    R0 = r0(e)
    out.append(_check('transitivity', 'transitive iff R0 = 0', _bool(trans == (R0 == 0)), depth,
                      {'transitive': trans, 'R0': R0}))
    if depth >= 2:
        fr = fractal_check(e, depth, cap)
        out.append(_check('transitivity', 'fractal iff R0 = 0', _bool(fr == (R0 == 0)), depth,
                          {'fractal': fr, 'R0': R0}))
    history = []
    for lv in range(1, depth + 1):
        history.append(LevelQuotient(e, lv, cap).group.abelian_invariants())
    expected = sorted([e.m, e.p ** (e.n - R0)], reverse=True)
    verdict = PASS if history[-1] == expected else INCONCLUSIVE
    out.append(_check('abelianization', 'G/G\' = C_{p^n} x C_{p^(n-R0)}', verdict, depth,
                      {'by_depth': history, 'expected': expected}))
    return out


def constant_checks(p: int, n: int, depth: int, cap: int, seed: int) -> list[dict]:
    out = []
    if depth < 2:
        return [_check('constant_case', 'constant-vector suite', NA, depth, {'reason': 'depth < 2'})]
    nb = not_branch_report((p, n), depth, cap=cap)
    for item in nb['items']:
        out.append(_check('not_branch', item['name'], item['verdict'], depth, item['detail']))
    qd = q_order(p, n, depth, cap)
    out.append(_check('quotient_order', '|Q_l| = p^((l+1)n), class l',
                      _bool(qd.order == qd.expected and qd.nilpotency_class == depth), depth, qd.to_dict()))
    model = {str(i): str(model_lcs_index(p, n, i)) for i in range(1, 7)}
    out.append(_check('companion_model', '|P : gamma_i(P)| = p^(in)',
                      _bool(all(int(v) == p ** (int(i) * n) for i, v in model.items())), None, model))
    sc = structure_crosscheck(p, n, depth, cap)
    out.append(_check('companion_model', sc.name, _bool(sc.passed), depth, sc.detail))
    vp = verify_prop_products(p, n, depth, seed=seed, cap=cap)
    out.append(_check('section_products', vp.name, _bool(vp.passed), depth, vp.detail))
    if depth >= 3:
        st = stab1_derived_equals_stab2(p, n, depth, cap)
        out.append(_check('stab1_derived', st.name, _bool(st.passed), depth, st.detail))
    else:
        out.append(_check('stab1_derived', "st(1)' = st(2)", NA, depth, {'reason': 'needs depth >= 3'}))
    out.append(_check('not_branch', 'conclusion', nb['verdict'], depth, {'statement': nb['conclusion']}))
    return out


def _summary(checks: list[dict]) -> dict:
    counts = {PASS: 0, FAIL: 0, NA: 0, INCONCLUSIVE: 0}
    for c in checks:
        counts[c['verdict']] += 1
    failed = counts[FAIL] + counts[INCONCLUSIVE]
    return {'passed': counts[PASS], 'failed': counts[FAIL], 'not_applicable': counts[NA],
            'inconclusive': counts[INCONCLUSIVE], 'exit_code': 1 if failed else 0,
            'status': 'FAIL' if failed else 'PASS'}


def build_report(cfg: RunConfig) -> dict:
    e = cfg.vector
    cls = classify(e)
    checks: list[dict] = []
    if cfg.command == 'classify':
        pass
    elif cfg.command == 'battery':
        checks = battery_checks(e, cfg.depth)
    elif cfg.command == 'constant-case':
        if not is_constant(e):
            raise NotApplicable('constant-case needs a constant defining vector')
        checks = constant_checks(e.p, e.n, cfg.depth, cfg.cap, cfg.seed)
    elif cfg.command == 'verify':
        suite = cfg.suite
        if suite in ('all', 'reduction'):
            checks += reduction_checks(e, cfg.depth)
        if suite in ('all', 'quotient'):
            checks += quotient_checks(e, cfg.depth, cfg.cap)
        if suite in ('all', 'battery'):
            checks += battery_checks(e, max(cfg.depth, 2))
        if suite in ('all', 'branch'):
            checks += branch_checks(e, cfg.depth, cfg.cap)
        if suite == 'constant-case' or (suite == 'all' and is_constant(e)):
            if not is_constant(e):
                raise NotApplicable('constant-case needs a constant defining vector')
            checks += constant_checks(e.p, e.n, cfg.depth, cfg.cap, cfg.seed)
    else:
        raise ValueError(f'unknown command {cfg.command!r}')
    return {
        'schema': SCHEMA_VERSION,
        'config': cfg.to_dict(),
        'classification': cls.to_dict(),
        'checks': checks,
        'summary': _summary(checks),
    }


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


def render_text(report: dict) -> str:
    c = report['classification']
    cfg = report['config']
    lines = [
        f"vector   p={c['p']} n={c['n']} e={','.join(map(str, c['e']))}",
        f"route    {c['route']}  ({c['note']})",
        f"R0={c['R0']} Y={c['Y']} t={c['t']} k={c['k']} IS={c['is_IS']} maximal={c['Y_maximal']} "
        f"E={c['in_E']} E'={c['in_Eprime']} constant={c['is_constant']} periodic={c['is_periodic']} "
        f"partially_constant={c['partially_constant']}",
    ]
    if c['delta_values']:
        lines.append('delta    ' + ' '.join(f'{m}:{v}' for m, v in c['delta_values'].items()))
    if report['checks']:
        lines.append(f"checks   ({cfg['command']}, depth {cfg['depth']})")
    for ch in report['checks']:
        depth = '' if ch['depth'] is None else f" @{ch['depth']}"
        lines.append(f"  [{ch['verdict']}] {ch['anchor']}: {ch['name']}{depth}")
    s = report['summary']
    lines.append(f"summary  {s['status']}: {s['passed']} passed, {s['failed']} failed, "
                 f"{s['inconclusive']} inconclusive, {s['not_applicable']} not applicable")
    return '\n'.join(lines)

