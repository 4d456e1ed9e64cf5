import numpy as np
import pytest

import trajsim


def test_aggregates():
    s = trajsim.SubScores()
    s.ep = 0.8
    assert s.pdms == pytest.approx(11 / 12, abs=1e-12)
    s.ddc = 0.5
    assert s.epdms == pytest.approx(0.46875, abs=1e-12)


def test_clean_scene_human_scores_high():
    scene = trajsim.generate_scene("clean_straight", 3)
    human = scene.human_trajectory
    assert human.shape == (8, 3)
    assert trajsim.score_plan(human, scene).epdms >= 0.95
    dense = trajsim.rollout(human, scene)
    assert dense.shape == (41, 6)


def test_parked_probe_collides():
    scene = trajsim.generate_scene("parked_agent", 5)
    assert trajsim.score_plan(trajsim.probe_plan("parked_agent", 5), scene).nc == 0.0


def test_scene_json_round_trip():
    scene = trajsim.generate_scene("red_light", 1)
    again = trajsim.Scene.from_json(scene.to_json())
    assert again.to_json() == scene.to_json()


def test_vocabulary_and_distillation():
    scenes = [trajsim.generate_scene(t, 10) for t in trajsim.template_names()]
    corpus = [trajsim.generate_scene(t, s).human_trajectory for t in trajsim.template_names() for s in range(20)]
    vocab = trajsim.kmeans(corpus, k=8, seed=1)
    assert len(vocab) == 8
    hist = vocab.inertia_history
    assert all(b <= a for a, b in zip(hist, hist[1:]))
    m1 = trajsim.score_vocabulary(scenes, vocab, workers=1)
    m2 = trajsim.score_vocabulary(scenes, vocab, workers=2)
    assert m1.shape == (len(scenes), 8)
    assert np.array_equal(m1, m2)
    idx, scores, trajs = trajsim.select_pseudo_teachers(list(m1[0]), vocab, threshold=1e-9, n_pseudo=3, seed=2)
    assert len(idx) == len(scores) == len(trajs) <= 3


def test_loss_and_selection():
    human = np.zeros((8, 3))
    shifted = human.copy()
    shifted[0, 1] = 1.0
    assert trajsim.distill_loss([[shifted]], human, [], 0.1) == pytest.approx(1.0, abs=1e-12)
    assert trajsim.recalibrate([0.5, 0.9], [1.0, 0.0]) == pytest.approx([4.5 / 8, 6.3 / 8])
    scene = trajsim.generate_sequence(2, 8.0, 7)[0]
    straight = np.array([[4.0 * (i + 1), 0.0, 0.0] for i in range(8)])
    index, dense, comfort, recal = trajsim.select([straight, straight], [0.2, 0.9], scene)
    assert index == 1 and dense.shape == (41, 6) and len(comfort) == 2


def test_diversity_identical_is_zero():
    p = np.array([[4.0 * (i + 1), 0.0, 0.0] for i in range(8)])
    assert trajsim.diversity([p, p, p]) == 0.0
