#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试命令行入口: 参数解析、配置合并与退出码。
"""

import json
import logging
import os
import tempfile
import unittest

from sigma_yamabe.config import config
from sigma_yamabe.data.io import DataIO
from sigma_yamabe.errors import ConfigError
from sigma_yamabe.main import (
    EXIT_CHECKS_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    build_parser,
    load_config_file,
    main,
)
from sigma_yamabe.utils.logger import DEFAULT_LOG_FILE, NAMESPACE, set_log_file


class TestCli(unittest.TestCase):
    """命令行的测试用例。"""

    def setUp(self):
        """设置测试环境。"""
        self.temp_dir = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.temp_dir.name, 'results')

    def tearDown(self):
        """清理测试环境。"""
        self.temp_dir.cleanup()

    def _write_config(self, content):
        path = os.path.join(self.temp_dir.name, 'config.json')
        with open(path, 'w', encoding='utf-8') as f:
            f.write(content if isinstance(content, str) else json.dumps(content))
        return path

    def test_parser(self):
        """子命令与公共参数"""
        args = build_parser().parse_args(['solve', '--path', 'defm', '--grid', '31',
                                          '--seed', '3', '--tol', '1e-8'])
        self.assertEqual((args.command, args.path, args.grid, args.seed, args.tol),
                         ('solve', 'defm', 31, 3, 1e-8))
        with self.assertRaises(SystemExit):
            build_parser().parse_args(['plot'])
        with self.assertRaises(SystemExit):
            build_parser().parse_args(['curvature', '--test-mode', 'broken-coefficient'])

    def test_identities_pass(self):
        """默认配置通过, 退出码 0, 写出台账"""
        code = main(['identities', '--samples', '20', '--out', self.out])
        self.assertEqual(code, EXIT_OK)
        ledger = DataIO.read_json(os.path.join(self.out, 'identities', 'ledger.json'))
        self.assertTrue(ledger['passed'])
        self.assertEqual(ledger['config']['samples'], 20)
        self.assertTrue(os.path.exists(os.path.join(self.out, 'identities', 'timing.json')))

    def test_identical_runs_identical_bytes(self):
        """同一配置与种子两次运行的 ledger.json 字节相同"""
        contents = []
        for _ in range(2):
            main(['identities', '--samples', '20', '--seed', '5', '--out', self.out])
            with open(os.path.join(self.out, 'identities', 'ledger.json'), 'rb') as f:
                contents.append(f.read())
        self.assertEqual(contents[0], contents[1])

    def test_broken_coefficient(self):
        """注入错误系数, 退出码 1"""
        code = main(['identities', '--samples', '20', '--test-mode', 'broken-coefficient',
                     '--out', self.out])
        self.assertEqual(code, EXIT_CHECKS_FAILED)
        ledger = DataIO.read_json(os.path.join(self.out, 'identities', 'ledger.json'))
        failed = [row['check'] for row in ledger['rows'] if not row['passed']]
        self.assertIn('newton_trace', failed)

    def test_config_errors(self):
        """无法解析或校验失败的配置, 退出码 2"""
        bad_json = self._write_config('{"solver": ')
        self.assertEqual(main(['identities', '--config', bad_json, '--out', self.out]),
                         EXIT_CONFIG_ERROR)
        missing = os.path.join(self.temp_dir.name, 'missing.json')
        self.assertEqual(main(['identities', '--config', missing, '--out', self.out]),
                         EXIT_CONFIG_ERROR)
        self.assertEqual(main(['identities', '--n', '3', '--k', '5', '--out', self.out]),
                         EXIT_CONFIG_ERROR)
        self.assertEqual(main(['solve', '--grid', '3', '--out', self.out]), EXIT_CONFIG_ERROR)
        section = self._write_config({'solver': 5})
        self.assertEqual(main(['solve', '--config', section, '--out', self.out]),
                         EXIT_CONFIG_ERROR)
        self.assertEqual(main(['solve', '--path', 'defm', '--n', '5', '--out', self.out]),
                         EXIT_CONFIG_ERROR)

    def test_load_config_file(self):
        """顶层必须是对象"""
        with self.assertRaises(ConfigError):
            load_config_file(self._write_config('[1, 2]'))
        self.assertEqual(load_config_file(self._write_config({'experiment': {'n': 4}})),
                         {'experiment': {'n': 4}})

    def test_cone_violation_exit(self):
        """初值离开锥: 台账中的结构化错误, 退出码 3"""
        path = self._write_config({
            'solver': {'start': {'name': 'polynomial', 'coefficients': [0.0, -2.0]}},
        })
        code = main(['solve', '--config', path, '--path', 'fixed', '--nodes', '51',
                     '--out', self.out])
        self.assertEqual(code, EXIT_NUMERICAL_FAILURE)
        ledger = DataIO.read_json(os.path.join(self.out, 'solve', 'ledger.json'))
        self.assertEqual(ledger['errors'][0]['check'], 'constant_regression')
        self.assertEqual(ledger['errors'][0]['error'], 'ConeViolationError')

    def test_config_restored(self):
        """配置文件只作用于本次调用"""
        before = config.get('solver.start')
        path = self._write_config({'experiment': {'samples': 20},
                                   'output': {'directory': 'elsewhere'}})
        self.assertEqual(main(['identities', '--config', path, '--out', self.out]), EXIT_OK)
        self.assertEqual(config.get('solver.start'), before)
        self.assertEqual(config.get('output.directory'), 'results')

    def test_log_file_section(self):
        """logging.file 把本次运行的日志写到指定文件"""
        log_path = os.path.join(self.temp_dir.name, 'run.log')
        path = self._write_config({'experiment': {'samples': 20},
                                   'logging': {'level': 'INFO', 'file': log_path}})
        try:
            self.assertEqual(main(['identities', '--config', path, '--out', self.out]), EXIT_OK)
            for handler in logging.getLogger(NAMESPACE).handlers:
                handler.flush()
            with open(log_path, encoding='utf-8') as f:
                self.assertIn('结果写入', f.read())
        finally:
            set_log_file(None)
            try:
                set_log_file(DEFAULT_LOG_FILE)
            except OSError:
                pass


if __name__ == '__main__':
    unittest.main()
