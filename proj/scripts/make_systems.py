"""Writes the bundled 13-bus and 34-bus feeder analogs to data/systems/.

Topologies and spot loads follow the shape of the well-known test feeders;
line impedances are relative lengths scaled so that the linearized worst
squared-voltage drop at nominal load (capacitors off, unity ratios) equals
TARGET_DROP. Device ratings are artifact choices.
"""
import json
import pathlib
import sys

TARGET_DROP = 0.08
R_PER_LEN, X_PER_LEN = 1.0, 2.0
ABC = [0, 1, 2]


def build(name, source, base_kv, base_mva, lines, specials, loads, caps, bats, regs):
    phases = {source: ABC}
    edges = []
    for e in lines + specials:
        phases.setdefault(e["from"], ABC)
        phases[e["to"]] = e["phases"]
    # Linearized drop per phase, used only to pick the impedance scale.
    parent = {e["to"]: e for e in lines + specials}
    load_p = {}
    for ld in loads:
        load_p[(ld["bus"], ld["phase"])] = load_p.get((ld["bus"], ld["phase"]), 0.0) + ld["p_kw"]
    q_of = {}
    for ld in loads:
        q_of[(ld["bus"], ld["phase"])] = q_of.get((ld["bus"], ld["phase"]), 0.0) + ld["q_kvar"]

    children = {}
    for e in lines + specials:
        children.setdefault(e["from"], []).append(e["to"])

    def downstream(bus, ph):
        p = load_p.get((bus, ph), 0.0)
        q = q_of.get((bus, ph), 0.0)
        for c in children.get(bus, []):
            if ph in phases[c]:
                dp, dq = downstream(c, ph)
                p += dp
                q += dq
        return p, q

    worst = 0.0
    for bus in phases:
        for ph in phases[bus]:
            drop, b = 0.0, bus
            while b in parent:
                e = parent[b]
                if "length" in e:
                    p, q = downstream(b, ph)
                    drop += 2 * (R_PER_LEN * p + X_PER_LEN * q) * e["length"] / (1000.0 * base_mva)
                b = e["from"]
            worst = max(worst, drop)
    k = TARGET_DROP / worst

    for e in lines:
        n = len(e["phases"])
        edges.append({"id": e["id"], "from": e["from"], "to": e["to"], "phases": e["phases"], "kind": "line",
                      "r_pu": [round(R_PER_LEN * e["length"] * k, 9)] * n,
                      "x_pu": [round(X_PER_LEN * e["length"] * k, 9)] * n})
    for e in specials:
        edges.append({key: v for key, v in e.items() if key != "length"})

    return {
        "source": {"bus": source, "v_pu": 1.0, "base_mva": base_mva},
        "buses": sorted(({"id": b, "phases": p, "base_kv": base_kv} for b, p in phases.items()), key=lambda x: x["id"]),
        "edges": sorted(edges, key=lambda x: x["id"]),
        "loads": sorted(loads, key=lambda x: x["id"]),
        "capacitors": caps,
        "regulators": regs,
        "batteries": bats,
    }


def line(frm, to, length, phases=ABC):
    return {"id": f"l{frm}_{to}", "from": frm, "to": to, "phases": phases, "length": length}


def loads_of(table):
    out = []
    for i, (bus, ph, p, q) in enumerate(table):
        out.append({"id": f"ld{bus}{'abc'[ph]}", "bus": bus, "phase": ph, "p_kw": p, "q_kvar": q,
                    "profile": "residential" if i % 3 else "commercial"})
    return out


def regulator_edge(eid, frm, to, prefix):
    ids = [f"{prefix}{'abc'[p]}" for p in ABC]
    edge = {"id": eid, "from": frm, "to": to, "phases": ABC, "kind": "regulator", "regulators": ids}
    regs = [{"id": rid, "edge": eid, "phase": p, "n_taps": 33, "ratio_min": 0.9, "ratio_max": 1.1}
            for rid, p in zip(ids, ABC)]
    return edge, regs


def thirteen():
    reg_edge, regs = regulator_edge("reg650", "650", "rg60", "reg")
    lines = [
        line("rg60", "632", 2.0), line("632", "633", 0.5),
        line("632", "645", 0.5, [1, 2]), line("645", "646", 0.3, [1, 2]),
        line("632", "671", 2.0), line("671", "680", 1.0),
        line("671", "684", 0.3, [0, 2]), line("684", "611", 0.3, [2]), line("684", "652", 0.8, [0]),
        line("671", "692", 0.01), line("692", "675", 0.5),
    ]
    xfmr = {"id": "x633_634", "from": "633", "to": "634", "phases": ABC, "kind": "transformer", "ratio": 1.0}
    table = [
        ("632", 0, 17, 10), ("632", 1, 66, 38), ("632", 2, 117, 68),
        ("634", 0, 160, 110), ("634", 1, 120, 90), ("634", 2, 120, 90),
        ("645", 1, 170, 125), ("646", 1, 230, 132), ("652", 0, 128, 86),
        ("671", 0, 385, 220), ("671", 1, 385, 220), ("671", 2, 385, 220),
        ("675", 0, 485, 190), ("675", 1, 68, 60), ("675", 2, 290, 212),
        ("692", 2, 170, 151), ("611", 2, 170, 80),
    ]
    caps = [{"id": "cap611", "bus": "611", "phases": [2], "kvar": 100.0},
            {"id": "cap675", "bus": "675", "phases": ABC, "kvar": 200.0}]
    bats = [{"id": "bat680", "bus": "680", "phases": ABC, "e_max_kwh": 1000.0, "p_max_kw": 250.0, "soc0": 1.0}]
    return build("13bus", "650", 4.16, 5.0, lines, [reg_edge, xfmr], loads_of(table), caps, bats, regs)


def thirtyfour():
    reg1, regs1 = regulator_edge("reg814", "814", "814r", "reg1")
    reg2, regs2 = regulator_edge("reg852", "852", "852r", "reg2")
    A, B = [0], [1]
    lines = [
        line("800", "802", 2.58), line("802", "806", 1.73), line("806", "808", 32.23),
        line("808", "810", 5.804, B), line("808", "812", 37.5), line("812", "814", 29.73),
        line("814r", "850", 0.01), line("850", "816", 0.31), line("816", "818", 1.71, A),
        line("818", "820", 48.15, A), line("820", "822", 13.74, A), line("816", "824", 10.21),
        line("824", "826", 3.03, B), line("824", "828", 0.84), line("828", "830", 20.44),
        line("830", "854", 0.52), line("854", "856", 23.33, B), line("854", "852", 36.83),
        line("852r", "832", 0.01), line("832", "858", 4.9), line("858", "864", 1.62, A),
        line("858", "834", 5.83), line("834", "860", 2.02), line("860", "836", 2.68),
        line("836", "840", 0.86), line("836", "862", 0.28), line("862", "838", 4.86, B),
        line("834", "842", 0.28), line("842", "844", 1.35), line("844", "846", 3.64),
        line("846", "848", 0.53), line("888", "890", 10.56),
    ]
    xfmr = {"id": "x832_888", "from": "832", "to": "888", "phases": ABC, "kind": "transformer", "ratio": 1.0}
    table = [
        ("806", 1, 30, 15), ("806", 2, 25, 14), ("810", 1, 16, 8), ("820", 0, 34, 17),
        ("822", 0, 135, 70), ("824", 1, 5, 2), ("826", 1, 40, 20), ("828", 2, 4, 2),
        ("830", 0, 17, 8), ("830", 1, 10, 5), ("830", 2, 25, 10), ("856", 1, 4, 2),
        ("858", 0, 7, 3), ("858", 1, 2, 1), ("858", 2, 6, 3), ("864", 0, 2, 1),
        ("834", 0, 4, 2), ("834", 1, 15, 8), ("834", 2, 13, 7),
        ("860", 0, 36, 24), ("860", 1, 40, 26), ("860", 2, 130, 71),
        ("836", 0, 30, 15), ("836", 1, 10, 6), ("836", 2, 42, 22),
        ("840", 0, 27, 16), ("840", 1, 31, 18), ("840", 2, 9, 7), ("838", 1, 28, 14),
        ("844", 0, 144, 110), ("844", 1, 135, 105), ("844", 2, 135, 105),
        ("846", 1, 25, 12), ("846", 2, 20, 11),
        ("848", 0, 20, 16), ("848", 1, 43, 27), ("848", 2, 20, 16),
        ("890", 0, 150, 75), ("890", 1, 150, 75), ("890", 2, 150, 75),
    ]
    caps = [{"id": "cap844", "bus": "844", "phases": ABC, "kvar": 100.0},
            {"id": "cap848", "bus": "848", "phases": ABC, "kvar": 150.0}]
    bats = [{"id": "bat832", "bus": "832", "phases": ABC, "e_max_kwh": 1200.0, "p_max_kw": 300.0, "soc0": 1.0},
            {"id": "bat890", "bus": "890", "phases": ABC, "e_max_kwh": 600.0, "p_max_kw": 150.0, "soc0": 1.0}]
    return build("34bus", "800", 24.9, 2.5, lines, [reg1, reg2, xfmr], loads_of(table), caps, bats, regs1 + regs2)


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for fname, circuit in (("13bus.json", thirteen()), ("34bus.json", thirtyfour())):
        (out / fname).write_text(json.dumps(circuit, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "data" / "systems")
