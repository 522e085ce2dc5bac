"""实验结果读写基础设施包。"""
