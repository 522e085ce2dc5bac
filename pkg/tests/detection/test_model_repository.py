"""模型持久化测试。"""

import json

import numpy as np
import pytest

from src.detection.infrastructure.model_repository import MODEL_FORMAT_VERSION, ModelRepository
from src.detection.services.ocsvm import OneClassSvmTrainer, decide_batch
from src.shared.errors import ModelFormatError

pytestmark = pytest.mark.unit


@pytest.fixture
def model():
    rng = np.random.default_rng(8)
    return OneClassSvmTrainer().train(rng.standard_normal((25, 4)), nu=0.2)


class TestModelRepository:
    """测试模型 JSON 文件的保存与读取。"""

    def test_saved_file_carries_version(self, model, temp_dir):
        """测试文件包含格式版本与全部参数。"""
        path = temp_dir / "model.json"

        ModelRepository().save(model, path)

        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["format_version"] == MODEL_FORMAT_VERSION
        assert payload["nu"] == 0.2
        assert payload["training_size"] == 25
        assert len(payload["alphas"]) == len(payload["support_vectors"])

    def test_loaded_model_decides_identically(self, model, temp_dir):
        """测试读回的模型对同一输入给出相同判决。"""
        path = temp_dir / "model.json"
        repository = ModelRepository()
        repository.save(model, path)

        restored = repository.load(path)

        queries = np.random.default_rng(9).standard_normal((20, 4))
        assert [d.label for d in decide_batch(restored, queries)] == [
            d.label for d in decide_batch(model, queries)
        ]
        assert restored.rho == model.rho

    def test_missing_file(self, temp_dir):
        """测试文件不存在。"""
        with pytest.raises(ModelFormatError):
            ModelRepository().load(temp_dir / "missing.json")

    def test_unsupported_version(self, model, temp_dir):
        """测试版本号不兼容。"""
        path = temp_dir / "model.json"
        ModelRepository().save(model, path)
        payload = json.loads(path.read_text(encoding="utf-8"))
        payload["format_version"] = 99
        path.write_text(json.dumps(payload), encoding="utf-8")

        with pytest.raises(ModelFormatError):
            ModelRepository().load(path)

    def test_corrupted_content(self, temp_dir):
        """测试内容不是合法 JSON。"""
        path = temp_dir / "model.json"
        path.write_text("{not json", encoding="utf-8")

        with pytest.raises(ModelFormatError):
            ModelRepository().load(path)
