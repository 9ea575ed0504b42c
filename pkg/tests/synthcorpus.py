"""Deterministic synthetic biomedical abstract generator for fixtures.

Builds PubMed-flavored abstracts from a fixed inventory of biomedical
terms and common English glue words, sampled Zipf-style from the
toolkit's portable RNG, so every test run sees byte-identical corpora
without bundling megabytes of text.
"""

from __future__ import annotations

from biotok.rng import Pcg32, derive_rng

FOCUS_TERMS = [
    "diabetes", "leukemia", "lithium", "insulin", "dna", "promoter",
    "hypertension", "nephropathy", "lymphoma", "lidocaine",
    "oropharyngeal", "cardiomyocyte", "chloramphenicol", "reca",
    "acetyltransferase", "clonidine", "naloxone",
]

BIOMED_TERMS = FOCUS_TERMS + [
    "metformin", "aspirin", "warfarin", "atorvastatin", "dexamethasone",
    "propofol", "epinephrine", "gefitinib", "teriparatide", "erythropoietin",
    "carcinoma", "adenoma", "melanoma", "sarcoma", "glioblastoma",
    "apoptosis", "angiogenesis", "fibrosis", "inflammation", "ischemia",
    "hypoxia", "sepsis", "meningitis", "nephritis", "hepatitis",
    "pancreatitis", "dermatitis", "arthritis", "bronchitis", "gastritis",
    "kinase", "phosphatase", "transferase", "hydrolase", "polymerase",
    "protease", "ligase", "oxidase", "reductase", "synthase",
    "receptor", "ligand", "cytokine", "chemokine", "interleukin",
    "antibody", "antigen", "epitope", "immunoglobulin", "histamine",
    "genome", "transcriptome", "proteome", "chromosome", "plasmid",
    "mutation", "deletion", "insertion", "translocation", "polymorphism",
    "transcription", "translation", "methylation", "phosphorylation",
    "acetylation", "glycosylation", "ubiquitination", "oxidation",
    "mitochondria", "ribosome", "lysosome", "endosome", "cytoplasm",
    "membrane", "nucleus", "organelle", "vesicle", "chromatin",
    "neuron", "astrocyte", "microglia", "hepatocyte", "fibroblast",
    "lymphocyte", "macrophage", "neutrophil", "eosinophil", "platelet",
    "glucose", "cholesterol", "triglyceride", "creatinine", "bilirubin",
    "albumin", "ferritin", "troponin", "hemoglobin", "cortisol",
    "serotonin", "dopamine", "glutamate", "acetylcholine", "melatonin",
    "cardiovascular", "pulmonary", "renal", "hepatic", "gastrointestinal",
    "neurological", "endocrine", "metabolic", "immunological", "vascular",
    "tumor", "biopsy", "prognosis", "diagnosis", "remission",
    "relapse", "metastasis", "chemotherapy", "radiotherapy", "immunotherapy",
    "placebo", "cohort", "biomarker", "phenotype", "genotype",
    "pathogenesis", "etiology", "epidemiology", "comorbidity", "mortality",
    "hypertensive", "diabetic", "ischemic", "septic", "fibrotic",
    "insulinoma", "nephropathic", "lymphomatous", "leukemic", "promoters",
    "cardiomyocytes", "acetyltransferases", "clonidines",
]

COMMON_WORDS = [
    "the", "of", "and", "in", "to", "a", "with", "for", "was", "were",
    "is", "are", "that", "this", "we", "patients", "study", "results",
    "treatment", "group", "after", "between", "compared", "significant",
    "increased", "decreased", "observed", "associated", "levels", "effect",
    "effects", "analysis", "clinical", "trial", "randomized", "controlled",
    "baseline", "outcome", "outcomes", "risk", "response", "dose",
    "therapy", "disease", "cell", "cells", "protein", "gene", "expression",
    "activity", "function", "role", "mechanism", "pathway", "signaling",
    "model", "mice", "human", "tissue", "blood", "serum", "plasma",
    "concentration", "administration", "higher", "lower", "during",
    "following", "underwent", "showed", "demonstrated", "suggest",
    "suggests", "indicate", "however", "although", "whereas", "both",
    "all", "using", "used", "measured", "assessed", "evaluated",
    "performed", "conducted", "reported", "findings", "data", "methods",
    "conclusion", "background", "objective", "significantly", "versus",
    "median", "mean", "range", "total", "overall", "improved", "reduced",
    "no", "not", "or", "by", "from", "at", "on", "as", "an", "be", "been",
    "may", "can", "these", "those", "their", "its", "our", "two", "three",
    "per", "each", "also", "than", "more", "most", "respectively",
]


def _weighted_pool(rank_words: list[str], repeat_cap: int = 60) -> list[str]:
    pool: list[str] = []
    for rank, word in enumerate(rank_words):
        copies = max(1, int(repeat_cap / (1 + 0.15 * rank)))
        pool.extend([word] * copies)
    return pool


_COMMON_POOL = _weighted_pool(COMMON_WORDS, repeat_cap=120)
_BIOMED_POOL = _weighted_pool(BIOMED_TERMS, repeat_cap=60)


def _sentence(rng: Pcg32, min_words: int = 8, max_words: int = 18) -> str:
    n = min_words + rng.next_below(max_words - min_words + 1)
    words = []
    for i in range(n):
        r = rng.next_float()
        if r < 0.55:
            words.append(_COMMON_POOL[rng.next_below(len(_COMMON_POOL))])
        elif r < 0.95:
            words.append(_BIOMED_POOL[rng.next_below(len(_BIOMED_POOL))])
        else:
            words.append(f"{rng.next_below(90) + 1}.{rng.next_below(10)}")
        if i > 1 and i < n - 1 and rng.next_float() < 0.06:
            words[-1] += ","
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


def make_abstract(rng: Pcg32, min_sentences: int = 8, max_sentences: int = 14) -> str:
    n = min_sentences + rng.next_below(max_sentences - min_sentences + 1)
    return " ".join(_sentence(rng) for _ in range(n))


def make_corpus_lines(n_abstracts: int, seed: int) -> list[str]:
    """``id<TAB>abstract`` lines, deterministic in (n_abstracts, seed)."""
    lines = []
    for i in range(n_abstracts):
        rng = derive_rng(seed, i)
        lines.append(f"PMID{i}\t{make_abstract(rng)}")
    return lines


def write_corpus(path, n_abstracts: int, seed: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(make_corpus_lines(n_abstracts, seed)) + "\n")
