"""模型持久化基础设施包。"""
