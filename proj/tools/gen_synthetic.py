#!/usr/bin/env python3
"""Generate the synthetic fixtures under tests/data.

The corpus is keyword-separable: biased chunks contain one sentence built
from a small set of stereotype words that never appear in non-biased chunks.
Output is deterministic for a given --seed.
"""
import argparse
import json
import random
from pathlib import Path

SUBJECTS = ["O réu", "A vítima", "A testemunha", "O acusado", "A defesa", "O Ministério Público",
            "A sentença", "O laudo pericial", "O boletim de ocorrência", "A autoridade policial"]
VERBS = ["afirmou", "declarou", "confirmou", "relatou", "sustentou", "apresentou", "registrou",
         "requereu", "negou", "reiterou"]
OBJECTS = ["os fatos narrados na denúncia", "a versão apresentada em juízo",
           "a materialidade do delito", "as provas colhidas na instrução",
           "o depoimento prestado na delegacia", "a pena fixada na origem",
           "o regime inicial de cumprimento", "a dosimetria adotada pelo juízo",
           "as medidas protetivas deferidas", "o recurso interposto pela defesa"]
TAILS = ["conforme consta dos autos", "durante a audiência de instrução",
         "em sede policial", "sem qualquer contradição relevante", "nos termos do artigo citado",
         "de forma clara e coerente", "perante a autoridade competente", "no prazo legal"]

# Stereotype vocabulary; only ever used in biased sentences.
BIAS_ADJ = ["histérica", "descontrolada", "vingativa", "ciumenta", "instável", "emotiva",
            "possessiva", "dramática"]
BIAS_NOUN = ["provocação", "ciúme", "vingança", "capricho"]
BIAS_TEMPLATES = [
    "A mulher {adj} claramente agiu por {noun} contra o companheiro",
    "Trata-se de mulher {adj} que buscava {noun} após a separação",
    "A mulher, mãe {adj} e {adj2}, usa o filho como instrumento de {noun}",
    "Sabe-se que mulher {adj} costuma exagerar por {noun}",
]

GENERAL_SYNONYMS = {
    "afirmou": ["disse", "asseverou"],
    "declarou": ["informou", "expôs"],
    "confirmou": ["ratificou", "corroborou"],
    "relatou": ["narrou", "contou"],
    "sustentou": ["defendeu", "alegou"],
    "fatos": ["acontecimentos", "eventos"],
    "provas": ["elementos", "evidências"],
    "depoimento": ["testemunho", "relato"],
    "pena": ["sanção", "reprimenda"],
    "recurso": ["apelo", "inconformismo"],
    "clara": ["nítida", "evidente"],
    "prazo": ["período", "lapso"],
}
BIAS_SYNONYMS = {
    "histérica": ["descontrolada", "dramática"],
    "descontrolada": ["histérica", "instável"],
    "vingativa": ["rancorosa"],
    "ciumenta": ["possessiva"],
    "instável": ["descontrolada", "emotiva"],
    "emotiva": ["sensível", "instável"],
    "provocação": ["afronta"],
    "ciúme": ["possessividade"],
    "vingança": ["retaliação", "desforra"],
}


def neutral_sentence(rng):
    s = f"{rng.choice(SUBJECTS)} {rng.choice(VERBS)} {rng.choice(OBJECTS)} {rng.choice(TAILS)}"
    return s + rng.choice([".", ".", ".", ";"])


def bias_sentence(rng):
    adj, adj2 = rng.sample(BIAS_ADJ, 2)
    return rng.choice(BIAS_TEMPLATES).format(adj=adj, adj2=adj2, noun=rng.choice(BIAS_NOUN)) + "."


def chunk_text(rng, biased):
    sentences = [neutral_sentence(rng) for _ in range(rng.randint(2, 3))]
    bias = None
    if biased:
        bias = bias_sentence(rng)
        sentences.insert(rng.randint(0, len(sentences)), bias)
    return " ".join(sentences), bias


def chunks(rng, prefix, n, biased_fraction):
    n_biased = round(n * biased_fraction)
    labels = [True] * n_biased + [False] * (n - n_biased)
    rng.shuffle(labels)
    out = []
    for i, biased in enumerate(labels):
        text, _ = chunk_text(rng, biased)
        count = text.count(". ") + text.count("; ") + 1
        out.append({
            "decision_id": f"{prefix}-{i:04d}",
            "range": [0, count - 1],
            "text": text,
            "label": "biased" if biased else "non_biased",
            "provenance": "anchored_on_bias_span" if biased else "window_sample",
        })
    return out


HEADER = ("TRIBUNAL DE JUSTIÇA\nPODER JUDICIÁRIO\nESTADO DE SÃO PAULO\n"
          "Registro: 2019.0000{n:03d}\n")
FOOTER = ("\nEste documento é cópia do original, assinado digitalmente por FULANO DE TAL.\n"
          "Para conferir o original, acesse o site do tribunal.\n")


def decisions(rng, n):
    out = []
    for i in range(n):
        kind = i % 3  # 0 biased, 1 annotated non-biased, 2 unannotated
        body = []
        spans = []
        for _ in range(rng.randint(2, 4)):
            text, bias = chunk_text(rng, kind == 0 and not spans)
            body.append(text)
            if bias:
                spans.append({"statement": bias, "targets": ["mul"], "category": "victim_or_woman_features"})
        raw = HEADER.format(n=i) + "\n".join(body) + FOOTER
        attrs = {}
        if kind != 2:
            attrs = {"resultado": "parcial", "pena_original": f"{rng.randint(1, 20)}.{rng.randint(0, 9)}",
                     "mp_pj": "s"}
        out.append({"id": f"dvc-{i:04d}", "raw_text": raw, "clean_text": None, "dataset_tag": "DVC",
                    "attributes": attrs, "bias_spans": spans})
    annotated = [d for d in out if d["attributes"] or d["bias_spans"]]
    biased = [d for d in annotated if d["bias_spans"]]
    manifest = {"tag": "DVC", "decision_count": len(out), "annotated_count": len(annotated),
                "biased_fraction": len(biased) / len(annotated), "schema_version": "1"}
    return {"manifest": manifest, "decisions": out}


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "tests" / "data")
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    write_jsonl(args.out / "synthetic_train.jsonl", chunks(rng, "syn-train", 200, 0.35))
    write_jsonl(args.out / "synthetic_val.jsonl", chunks(rng, "syn-val", 50, 0.36))
    write_jsonl(args.out / "synthetic_pac_train.jsonl", chunks(rng, "pac-train", 100, 0.3))
    write_jsonl(args.out / "synthetic_pac_val.jsonl", chunks(rng, "pac-val", 30, 0.3))
    with open(args.out / "synthetic_decisions.json", "w", encoding="utf-8") as f:
        json.dump(decisions(rng, 30), f, ensure_ascii=False, indent=2)
        f.write("\n")
    for name, d in (("synthetic_bias_dict.json", BIAS_SYNONYMS), ("synthetic_general_dict.json", GENERAL_SYNONYMS)):
        with open(args.out / name, "w", encoding="utf-8") as f:
            json.dump(d, f, ensure_ascii=False, indent=2)
            f.write("\n")


if __name__ == "__main__":
    main()
