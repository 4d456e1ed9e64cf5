"""Python bindings for the trajsim trajectory scoring library."""

from ._trajsim import (
    Scene,
    SubScores,
    Vocabulary,
    aggregate_epdms,
    aggregate_pdms,
    distill_loss,
    diversity,
    generate_scene,
    generate_sequence,
    kmeans,
    load_scene_dir,
    probe_plan,
    recalibrate,
    rollout,
    score_plan,
    score_vocabulary,
    select,
    select_pseudo_teachers,
    template_names,
)

__all__ = [
    "Scene",
    "SubScores",
    "Vocabulary",
    "aggregate_epdms",
    "aggregate_pdms",
    "distill_loss",
    "diversity",
    "generate_scene",
    "generate_sequence",
    "kmeans",
    "load_scene_dir",
    "probe_plan",
    "recalibrate",
    "rollout",
    "score_plan",
    "score_vocabulary",
    "select",
    "select_pseudo_teachers",
    "template_names",
]
