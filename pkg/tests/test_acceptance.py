"""Acceptance suite: one test per criterion, each printing a single
PASS/FAIL line with its measured counts and runtime.

Tolerances are pinned: every comparison is exact (bit patterns, subsets,
verdicts) and each criterion must also finish inside its time budget.
"""
import random
import time
from contextlib import contextmanager

from cohnet.cli import OK, main
from cohnet.constructions import (hard_code, hard_code_structure, instance_to_structure,
                                  schema_to_theory)
from cohnet.finset import FinFunction, find_natural_iso
from cohnet.formats import parse_dataset, write_params
from cohnet.minifloat import FloatFormat, fold_sum
from cohnet.nn import (Architecture, ParamAssignment, Tie, apply_constraints,
                       architecture_theory, build_model, compose, compose_spans, infer,
                       oracle_dataset, parse_ref, pol_instance, tables_for)
from cohnet.schema import (CategoryPresentation, Generator, NatTransformCandidate, Path as SPath,
                           check_functorial, check_natural, instance_from_tables,
                           transport_instance)
from cohnet.semantics import (check_model, check_model_morphism, eval_formula,
                              find_structure_iso, transport_structure)

from helpers import naive_formula, random_formula, random_signature, random_structure

S1E1M1 = FloatFormat(1, 1)
S1E2M1 = FloatFormat(2, 1)

BUDGET = {1: 30, 2: 60, 3: 60, 4: 120, 5: 30, 6: 120, 7: 30}


@contextmanager
def criterion(capsys, number, title):
    """Times the body, then prints one line; the body fills ``result``
    with ``ok`` and a short ``detail``."""
    result = {"ok": False, "detail": "did not finish"}
    start = time.perf_counter()
    try:
        yield result
    except Exception as exc:
        result["detail"] = f"raised {exc!r}"
        raise
    finally:
        elapsed = time.perf_counter() - start
        ok = result["ok"] and elapsed < BUDGET[number]
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number} {title}: {result['detail']}"
                  f" ({elapsed:.1f} s, budget {BUDGET[number]} s)")
    assert ok, result["detail"]


# -- 1 ------------------------------------------------------------------------

def test_criterion_1_inference_equals_oracle(capsys, tmp_path):
    arch = Architecture.parse("2-relu-2-id-1", S1E2M1)
    rng = random.Random(1)
    net = ["--arch", "2-relu-2-id-1", "--float", "s1e2m1"]
    with criterion(capsys, 1, "inference = oracle") as res:
        identical = 0
        for k in range(20):
            params = tmp_path / f"p{k}.txt"
            params.write_text(write_params(ParamAssignment.random(arch, rng)))
            a, b = tmp_path / f"infer{k}.ds", tmp_path / f"oracle{k}.ds"
            assert main(["nn", "infer", *net, "--params", str(params), "--out", str(a)]) == OK
            assert main(["nn", "oracle", *net, "--params", str(params), "--out", str(b)]) == OK
            _, da = parse_dataset(a.read_text())
            same = a.read_bytes() == b.read_bytes() and da.N.size == 256
            identical += same
        res["ok"] = identical == 20
        res["detail"] = f"{identical}/20 parameter draws bit-identical on all 256 inputs"
        capsys.readouterr()


# -- 2 ------------------------------------------------------------------------

def _random_schema_and_instance(rng):
    objects = tuple(f"O{k}" for k in range(rng.randint(1, 4)))
    gens = tuple(Generator(f"g{k}", rng.choice(objects), rng.choice(objects))
                 for k in range(rng.randint(0, 6)))
    sizes = {o: rng.randint(0, 4) for o in objects}
    for _ in gens:
        for g in gens:
            if sizes[g.src] and not sizes[g.dst]:
                sizes[g.dst] = 1
    tables = {g.name: [rng.randrange(sizes[g.dst]) for _ in range(sizes[g.src])] for g in gens}
    free = CategoryPresentation(objects, gens)
    inst = instance_from_tables(free, sizes, tables)
    # parallel paths of length <= 2; half the equations are chosen among
    # those the instance already satisfies so both verdicts occur
    paths = [SPath(o) for o in objects]
    paths += [SPath(g.src, (g.name,)) for g in gens]
    paths += [SPath(g.src, (g.name, h.name)) for g in gens for h in gens if g.dst == h.src]
    target = {p: free.target(p) for p in paths}
    pairs = [(p, q) for p in paths for q in paths
             if p != q and p.start == q.start and target[p] == target[q]]

    def value(p):
        f = FinFunction.identity(inst.object_map[p.start])
        for s in p.steps:
            f = f.then(inst.generator_map[s])
        return f

    holding = [pq for pq in pairs if value(pq[0]) == value(pq[1])]
    eqs = []
    for _ in range(rng.randint(0, 3)):
        pool = holding if holding and rng.random() < 0.5 else pairs
        if pool:
            eqs.append(rng.choice(pool))
    d = CategoryPresentation(objects, gens, tuple(eqs))
    return d, instance_from_tables(d, sizes, tables)


def _random_family(rng, source, target):
    return {o: FinFunction(s, target.object_map[o], tuple(
        rng.randrange(target.object_map[o].size) for _ in range(s.size)))
        for o, s in source.object_map.items()}


def _perm(rng, s):
    return FinFunction(s, s, tuple(rng.sample(range(s.size), s.size)))


def test_criterion_2_schema_theory_equivalence(capsys):
    rng = random.Random(2)
    with criterion(capsys, 2, "schema/theory equivalence") as res:
        func_bad = nat_bad = 0
        func_seen = {True: 0, False: 0}
        nat_seen = {True: 0, False: 0}
        for _ in range(600):
            d, inst = _random_schema_and_instance(rng)
            thy = schema_to_theory(d)
            m = instance_to_structure(inst)
            verdict = check_functorial(inst) is None
            func_seen[verdict] += 1
            func_bad += verdict != bool(check_model(m, thy))
            # component families: transports, transports with one entry
            # moved, and arbitrary endomorphism candidates
            kind = rng.randrange(3)
            if kind < 2:
                alpha = {o: _perm(rng, s) for o, s in inst.object_map.items()}
                other = transport_instance(inst, alpha)
                if kind == 1:
                    o = rng.choice(d.objects)
                    f = alpha[o]
                    if f.dom.size > 1:
                        t = list(f.table)
                        t[0] = (t[0] + 1) % f.cod.size
                        alpha[o] = FinFunction(f.dom, f.cod, tuple(t))
            else:
                other = inst
                alpha = _random_family(rng, inst, other)
            nat = check_natural(NatTransformCandidate(inst, other, alpha)) is None
            nat_seen[nat] += 1
            morph = check_model_morphism(m, instance_to_structure(other), alpha) is None
            nat_bad += nat != morph
        enough = sum(func_seen.values()) >= 500 and sum(nat_seen.values()) >= 500
        res["ok"] = enough and func_bad == 0 and nat_bad == 0 and min(func_seen.values()) > 0 \
            and min(nat_seen.values()) > 0
        res["detail"] = (f"{sum(func_seen.values())} pairs ({func_seen[True]} functorial), "
                         f"{func_bad} disagreements; {sum(nat_seen.values())} families "
                         f"({nat_seen[True]} natural), {nat_bad} disagreements")


# -- 3 ------------------------------------------------------------------------

def test_criterion_3_hard_coding_rigidity(capsys):
    rng = random.Random(3)
    inst = pol_instance(S1E1M1, "relu")
    thy = hard_code(inst)
    m = hard_code_structure(inst)
    typing = dict(m.signature.typing)
    with criterion(capsys, 3, "hard-coding rigidity") as res:
        wrong = 0
        wrong += not check_model(m, thy)
        for _ in range(50):
            alpha = {s: _perm(rng, a) for s, a in m.sort_map.items()}
            n = transport_structure(m, alpha)
            iso = find_natural_iso(m.sort_map, m.op_map, n.sort_map, n.op_map, typing)
            ok = (bool(check_model(n, thy)) and iso is not None
                  and check_model_morphism(m, n, iso) is None)
            wrong += not ok
        names = sorted(m.op_map)
        for _ in range(50):
            name = rng.choice(names)
            f = m.op_map[name]
            table = list(f.table)
            k = rng.randrange(len(table))
            table[k] = (table[k] + rng.randrange(1, f.cod.size)) % f.cod.size
            bad = m.replace(op_map={name: FinFunction(f.dom, f.cod, tuple(table))})
            wrong += bool(check_model(bad, thy))
        res["ok"] = wrong == 0
        res["detail"] = f"1 defining + 50 transports + 50 corruptions, {wrong} misclassified"


# -- 4 ------------------------------------------------------------------------

def test_criterion_4_semantics_oracle(capsys):
    rng = random.Random(4)
    with criterion(capsys, 4, "semantics kernel = naive evaluator") as res:
        bad = total = 0
        while total < 10_000:
            sig = random_signature(rng, max_sorts=3)
            m = random_structure(rng, sig, max_size=4)
            for _ in range(20):
                ctx = tuple(rng.choice(sig.sorts) for _ in range(rng.randint(0, 2)))
                phi = random_formula(rng, sig, ctx, 5, max_vars=4)
                bad += eval_formula(m, ctx, phi).members != tuple(naive_formula(m, ctx, phi))
                total += 1
        res["ok"] = bad == 0
        res["detail"] = f"{total} formulas (depth <= 5, sorts <= 4), {bad} disagreements"


# -- 5 ------------------------------------------------------------------------

def test_criterion_5_composition_coherence(capsys):
    a = Architecture.parse("2-relu-3", S1E2M1)
    b = Architecture.parse("3-id-1", S1E2M1)
    ab = compose(a, b)
    rng = random.Random(5)
    with criterion(capsys, 5, "composition coherence") as res:
        GA, iA = architecture_theory(a)
        GB, iB = architecture_theory(b)
        G, iota = architecture_theory(ab)
        pa, pb = ParamAssignment.random(a, rng), ParamAssignment.random(b, rng)
        pab = ParamAssignment(pa.weights + pb.weights, pa.biases + pb.biases)
        da = infer(GA, iA, build_model(GA, a, pa))
        db = infer(GB, iB, build_model(GB, b, pb))
        glued = compose_spans(da, db)
        subst = infer(G, iota, build_model(G, ab, pab))
        oa, ob = oracle_dataset(a, pa).t.table, oracle_dataset(b, pb).t.table
        pointwise = tuple(ob[y] for y in oa)
        same = (glued.f == subst.f and glued.t == subst.t and subst.t.table == pointwise
                and glued.N.size == 256)
        res["ok"] = same
        res["detail"] = ("pullback, substitution and pointwise composites "
                         f"{'agree' if same else 'differ'} on all 256 inputs")


# -- 6 ------------------------------------------------------------------------

def _circulant(kernel):
    return tuple(tuple(kernel[(j - i) % 3] for i in range(3)) for j in range(3))


def _is_circulant(w):
    return all(w[j][i] == w[(j - i) % 3][0] for j in range(3) for i in range(3))


def _convolution_oracle(tb, relu, kernel, bias, x):
    # y_j = relu(k_{j-0} x_0 + k_{j-1} x_1 + k_{j-2} x_2 + b_j), summed right to left
    n = tb.R.size
    mul, add = tb.mul.table, tb.add.table
    out = []
    for j in range(3):
        terms = [mul[kernel[(j - i) % 3] * n + x[i]] for i in range(3)]
        out.append(relu.table[add[fold_sum(tb, terms) * n + bias[j]]])
    return tuple(out)


def test_criterion_6_weight_tying(capsys):
    arch = Architecture.parse("3-relu-3", S1E1M1)
    ties = [Tie(parse_ref(f"w[1][{j},{i}]"), parse_ref(f"w[1][{(j - i) % 3},0]"))
            for j in range(3) for i in range(3) if i != 0]
    G, iota = architecture_theory(arch)
    H, iota_h = apply_constraints(G, iota, ties, arch)
    tb = tables_for(S1E1M1)
    relu = tb.activation("relu")
    rng = random.Random(6)
    bias = (0, 3, 1)
    with criterion(capsys, 6, "weight tying") as res:
        wrong = accepted = rejected = 0
        for k0 in range(8):
            for k1 in range(8):
                for k2 in range(8):
                    kernel = (k0, k1, k2)
                    w = _circulant(kernel)
                    m = build_model(H, arch, ParamAssignment((w,), (bias,)))
                    if not check_model(m, H):
                        wrong += 1
                        continue
                    accepted += 1
                    d = infer(H, iota_h, m, check=False)
                    want = [_convolution_oracle(tb, relu, kernel, bias, x) for x, _ in d.rows()]
                    wrong += [y for _, y in d.rows()] != want
                    # one entry off the circulant pattern
                    j, i = rng.choice([(j, i) for j in range(3) for i in range(3)])
                    off = [list(r) for r in w]
                    off[j][i] = (off[j][i] + rng.randrange(1, 8)) % 8
                    bad = build_model(H, arch, ParamAssignment((off,), (bias,)))
                    ok = bool(check_model(bad, H))
                    rejected += not ok
                    wrong += ok != _is_circulant(off)
        for _ in range(300):
            w = tuple(tuple(rng.randrange(8) for _ in range(3)) for _ in range(3))
            m = build_model(H, arch, ParamAssignment((w,), (bias,)))
            wrong += bool(check_model(m, H)) != _is_circulant(w)
        res["ok"] = wrong == 0 and accepted == 512
        res["detail"] = (f"{accepted}/512 circulant kernels accepted with convolution-exact "
                         f"inference, {rejected} perturbed and 300 random matrices checked, "
                         f"{wrong} misclassified")


# -- 7 ------------------------------------------------------------------------

def test_criterion_7_model_count(capsys):
    arch = Architecture.parse("1-relu-1", S1E1M1)
    G, _ = architecture_theory(arch)
    with criterion(capsys, 7, "model count") as res:
        models = []
        for w in range(8):
            for b in range(8):
                m = build_model(G, arch, ParamAssignment((((w,),),), ((b,),)))
                if check_model(m, G):
                    models.append(m)
        # the float part is rigid, so distinct parameters give distinct
        # isomorphism classes
        clashes = sum(find_structure_iso(models[i], models[j]) is not None
                      for i in range(len(models)) for j in range(i + 1, len(models)))
        res["ok"] = len(models) == 64 and clashes == 0
        res["detail"] = f"{len(models)} valid models of 64 assignments, {clashes} isomorphic pairs"


def test_budgets_cover_every_criterion():
    names = [n for n in globals() if n.startswith("test_criterion_")]
    assert sorted(int(n.split("_")[2]) for n in names) == sorted(BUDGET)
