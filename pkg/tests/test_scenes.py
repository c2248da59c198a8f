import numpy as np
import pytest

from attnloc.errors import DatasetFormatError, SceneGenerationError
from attnloc.scenes import (
    ConditionKind,
    ObjectKind,
    ObjectSpec,
    Task,
    color_mask,
    coverage_fraction,
    footprint_mask,
    generate_dataset,
    load_dataset,
    mask_centroid,
    render_scene,
    save_dataset,
    task_config,
    workspace_to_pixel,
)


class TestRenderScene:
    def test_empty_scene_is_pure_background(self):
        img = render_scene([], (64, 64))
        assert img.shape == (3, 64, 64)
        for kind in ObjectKind:
            assert not color_mask(img, kind).any()
        # checkerboard only: exactly two distinct colors
        flat = img.reshape(3, -1).T
        assert len(np.unique(flat, axis=0)) == 2

    def test_disc_at_center(self):
        img = render_scene([ObjectSpec(ObjectKind.DISC, (0.0, 0.0))],
                           (64, 64))
        u, v = mask_centroid(color_mask(img, ObjectKind.DISC))
        assert abs(u - 31.5) <= 0.5
        assert abs(v - 31.5) <= 0.5

    @pytest.mark.parametrize("kind", list(ObjectKind))
    @pytest.mark.parametrize("pos", [(25.0, 0.0), (-12.0, 18.0),
                                     (0.0, -25.0), (7.5, 7.5)])
    def test_centroid_matches_projection(self, kind, pos):
        img = render_scene([ObjectSpec(kind, pos)], (64, 64))
        u, v = mask_centroid(color_mask(img, kind))
        eu, ev = workspace_to_pixel(pos[0], pos[1], 64, 64)
        assert abs(u - eu) <= 1.0
        assert abs(v - ev) <= 1.0

    def test_out_of_bounds_position_rejected(self):
        with pytest.raises(SceneGenerationError):
            render_scene([ObjectSpec(ObjectKind.DISC, (28.0, 0.0))])

    def test_footprints_stay_on_canvas_at_margin(self):
        # worst case: extreme allowed position, every kind
        for kind in ObjectKind:
            spec = ObjectSpec(kind, (25.0, 25.0))
            mask = footprint_mask(spec, 64, 64)
            assert mask.any()
            img = render_scene([spec], (64, 64))
            u, v = mask_centroid(color_mask(img, kind))
            eu, ev = workspace_to_pixel(25.0, 25.0, 64, 64)
            assert abs(u - eu) <= 1.0 and abs(v - ev) <= 1.0

    def test_apparent_size_shrinks_toward_edges(self):
        near = footprint_mask(ObjectSpec(ObjectKind.DISC, (0.0, 0.0)), 64, 64)
        far = footprint_mask(ObjectSpec(ObjectKind.DISC, (24.0, 24.0)), 64, 64)
        assert near.sum() > far.sum()


class TestGenerateDataset:
    def test_regeneration_is_bit_identical(self):
        a = generate_dataset(Task.SINGLE, 4, seed=7)
        b = generate_dataset(Task.SINGLE, 4, seed=7)
        for sa, sb in zip(a.samples, b.samples):
            np.testing.assert_array_equal(sa.image, sb.image)
            np.testing.assert_array_equal(sa.targets, sb.targets)

    def test_task_counts(self):
        for task in Task:
            config = task_config(task)
            ds = generate_dataset(task, 6, seed=3)
            for s in ds.samples:
                assert len(s.objects) == config.presented
                assert s.targets.shape == (config.targets, 2)
                if config.condition_kind == ConditionKind.NONE:
                    assert s.condition is None
                else:
                    assert s.condition.shape == (config.condition_dim,)
                    assert s.condition.sum() == 1.0

    def test_position_task_objects_straddle_center(self):
        ds = generate_dataset(Task.POSITION, 12, seed=5)
        for s in ds.samples:
            assert len(s.objects) == 2
            x1 = s.objects[0].position[0]
            x2 = s.objects[1].position[0]
            assert np.sign(x1) * np.sign(x2) < 0
            assert s.objects[0].kind == s.objects[1].kind

    def test_position_task_conditions_balanced(self):
        ds = generate_dataset(Task.POSITION, 20, seed=2)
        lefts = sum(int(s.condition[0]) for s in ds.samples)
        assert lefts == 10

    def test_position_target_matches_condition(self):
        ds = generate_dataset(Task.POSITION, 8, seed=11)
        for s in ds.samples:
            side = int(np.argmax(s.condition))
            expected = s.objects[0] if side == 0 else s.objects[1]
            np.testing.assert_allclose(s.targets[0], expected.position,
                                       rtol=1e-6)
            assert (s.targets[0][0] < 0) == (side == 0)

    def test_type_task_conditions_cycle(self):
        ds = generate_dataset(Task.TYPE, 100, seed=9)
        counts = np.zeros(3, dtype=int)
        for s in ds.samples:
            counts[int(np.argmax(s.condition))] += 1
        assert all(30 <= c <= 37 for c in counts)

    def test_multi_targets_ordered_by_kind(self):
        ds = generate_dataset(Task.MULTI, 5, seed=1)
        for s in ds.samples:
            for i, obj in enumerate(s.objects):
                assert obj.kind == ObjectKind(i)
                np.testing.assert_allclose(s.targets[i], obj.position,
                                           rtol=1e-6)

    def test_min_separation_enforced(self):
        ds = generate_dataset(Task.MULTI, 30, seed=4)
        for s in ds.samples:
            ps = [o.position for o in s.objects]
            for i in range(len(ps)):
                for j in range(i + 1, len(ps)):
                    d = np.hypot(ps[i][0] - ps[j][0], ps[i][1] - ps[j][1])
                    assert d >= 12.0

    def test_footprints_never_overlap(self):
        ds = generate_dataset(Task.MULTI, 10, seed=8)
        for s in ds.samples:
            masks = [footprint_mask(o, 64, 64) for o in s.objects]
            for i in range(len(masks)):
                for j in range(i + 1, len(masks)):
                    assert not (masks[i] & masks[j]).any()

    def test_targets_recoverable_from_image(self):
        # ground truth must match the rendered color-mask centroid
        for task in Task:
            ds = generate_dataset(task, 6, seed=13)
            for s in ds.samples:
                for obj in s.objects:
                    mask = color_mask(s.image, obj.kind)
                    if task == Task.POSITION:
                        # two same-kind objects share a color: split by side
                        u_mid = 31.5
                        side = mask.copy()
                        cols = np.arange(64)[None, :]
                        if obj.position[0] < 0:
                            side &= cols < u_mid
                        else:
                            side &= cols > u_mid
                        mask = side
                    u, v = mask_centroid(mask)
                    eu, ev = workspace_to_pixel(obj.position[0],
                                                obj.position[1], 64, 64)
                    assert abs(u - eu) <= 1.0 and abs(v - ev) <= 1.0

    def test_coverage_thresholds(self):
        # density analogue: big datasets blanket the workspace, tiny ones
        # leave it sparse
        big = generate_dataset(Task.SINGLE, 100, seed=1)
        small = generate_dataset(Task.SINGLE, 4, seed=1)
        assert coverage_fraction(big) >= 0.55
        assert coverage_fraction(small) <= 0.08

    def test_invalid_size(self):
        with pytest.raises(SceneGenerationError):
            generate_dataset(Task.SINGLE, 0, seed=1)


class TestDatasetIO:
    def test_round_trip(self, tmp_path):
        ds = generate_dataset(Task.TYPE, 5, seed=21)
        path = tmp_path / "scenes.gald"
        save_dataset(ds, path)
        back = load_dataset(path)
        assert back.size == ds.size
        assert back.seed == ds.seed
        assert back.task == ds.task
        for sa, sb in zip(ds.samples, back.samples):
            np.testing.assert_array_equal(sa.image, sb.image)
            np.testing.assert_array_equal(sa.targets, sb.targets)
            np.testing.assert_array_equal(sa.condition, sb.condition)
            assert [o.kind for o in sa.objects] == [o.kind for o in sb.objects]
            for oa, ob in zip(sa.objects, sb.objects):
                np.testing.assert_allclose(oa.position, ob.position,
                                           rtol=1e-6)

    def test_truncated_file_is_a_parse_error(self, tmp_path):
        ds = generate_dataset(Task.SINGLE, 2, seed=1)
        path = tmp_path / "scenes.gald"
        save_dataset(ds, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:len(blob) // 2])
        with pytest.raises(DatasetFormatError) as exc:
            load_dataset(path)
        assert exc.value.offset is not None

    def test_unknown_version_rejected(self, tmp_path):
        ds = generate_dataset(Task.SINGLE, 1, seed=1)
        path = tmp_path / "scenes.gald"
        save_dataset(ds, path)
        blob = bytearray(path.read_bytes())
        blob[4] = 99
        path.write_bytes(bytes(blob))
        with pytest.raises(DatasetFormatError, match="version"):
            load_dataset(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.gald"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(DatasetFormatError, match="magic"):
            load_dataset(path)
