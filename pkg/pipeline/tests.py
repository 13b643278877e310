import json
import shutil
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from chainvuln import __version__

from .artifacts import ArtifactWriter
from .config import build_pipeline_config, load_pipeline_config
from .exceptions import ConfigError, MissingArtifactError
from .models import PipelineRun

BASE_DIR = Path(__file__).resolve().parent.parent
ISSUES = BASE_DIR / 'vulnfilter' / 'fixtures' / 'issues.json'
COMMITS = BASE_DIR / 'vulnfilter' / 'fixtures' / 'commits.json'
EMBEDDINGS = BASE_DIR / 'textcluster' / 'fixtures' / 'embeddings.txt'

PIPELINE = [
    ('ingest',),
    ('filter',),
    ('modules',),
    ('types', '--candidates-only'),
    ('signatures', '--candidates-only'),
    ('cluster', '--text'),
    ('cluster', '--code'),
]


def temp_dir(test):
    path = Path(tempfile.mkdtemp())
    test.addCleanup(shutil.rmtree, path)
    return path


class PipelineConfigTests(SimpleTestCase):
    def setUp(self):
        self.base = temp_dir(self)

    def build(self, **sections):
        return build_pipeline_config({'schema_version': 1, **sections}, self.base)

    def assertConfigError(self, fragment, **sections):
        with self.assertRaises(ConfigError) as ctx:
            self.build(**sections)
        self.assertIn(fragment, str(ctx.exception))

    def test_defaults(self):
        config = load_pipeline_config()
        self.assertEqual(config.k_grid(30), [25, 27, 29])
        self.assertEqual(config.k_grid(3), [])
        grid = config.damping_grid()
        self.assertEqual((grid[0], grid[-1], len(grid)), (0.5, 0.99, 50))
        self.assertEqual(config.ap_params().damping, 0.78)
        self.assertEqual(config.match_threshold, 0.8)
        self.assertTrue(config.path('architecture_map').exists())

    def test_unsupported_schema_version(self):
        with self.assertRaises(ConfigError) as ctx:
            build_pipeline_config({'schema_version': 2}, self.base)
        self.assertIn('schema_version', str(ctx.exception))

    def test_invalid_grid(self):
        self.assertConfigError('clustering.k_grid', clustering={'k_grid': [9, 2, 1]})
        self.assertConfigError('clustering.damping_grid', clustering={'damping_grid': [0.5, 0.9]})
        self.assertConfigError('clustering.k_grid', clustering={'k_grid': [2, 8, 1, 4]})
        self.assertConfigError('clustering.damping_grid', clustering={'damping_grid': 'abc'})

    def test_window_must_be_shorter_than_iterations(self):
        self.assertConfigError(
            'clustering.ap_convergence_window',
            clustering={'ap_max_iterations': 10, 'ap_convergence_window': 10},
        )

    def test_missing_path(self):
        self.assertConfigError('paths.issues', paths={'issues': 'missing.json'})

    def test_target_must_be_a_directory(self):
        (self.base / 'file.txt').write_text('x', encoding='utf-8')
        self.assertConfigError('paths.targets[0]', paths={'targets': ['file.txt']})

    def test_relative_paths_resolve_against_config_dir(self):
        (self.base / 'issues.json').write_text('{}', encoding='utf-8')
        (self.base / 'repo').mkdir()
        config = self.build(paths={'issues': 'issues.json', 'targets': ['repo'], 'output_dir': 'out'})
        self.assertEqual(config.path('issues'), (self.base / 'issues.json').resolve())
        self.assertEqual(config.targets, ((self.base / 'repo').resolve(),))
        self.assertEqual(config.output_dir, self.base / 'out')

    def test_require_names_the_command(self):
        with self.assertRaises(ConfigError) as ctx:
            self.build().require('embeddings', 'cluster')
        self.assertIn('paths.embeddings', str(ctx.exception))

    def test_digest(self):
        first = self.build(clustering={'ap_damping': 0.8, 'k_grid': [2, 4, 1]})
        same = build_pipeline_config(
            {'clustering': {'k_grid': [2, 4, 1], 'ap_damping': 0.8}, 'schema_version': 1}, self.base,
        )
        other = self.build(clustering={'ap_damping': 0.9})
        self.assertEqual(len(first.digest), 64)
        self.assertEqual(first.digest, same.digest)
        self.assertNotEqual(first.digest, other.digest)

    def test_config_file(self):
        path = self.base / 'config.json'
        path.write_text(json.dumps({'schema_version': 1, 'scan': {'match_threshold': 0.9}}), encoding='utf-8')
        self.assertEqual(load_pipeline_config(str(path)).match_threshold, 0.9)
        path.write_text('{not json', encoding='utf-8')
        with self.assertRaises(ConfigError):
            load_pipeline_config(str(path))
        with self.assertRaises(ConfigError):
            load_pipeline_config(str(self.base / 'absent.json'))


class ArtifactWriterTests(SimpleTestCase):
    def setUp(self):
        self.out = temp_dir(self) / 'artifacts'
        self.writer = ArtifactWriter(self.out, 'abc123')

    def test_json_carries_provenance(self):
        self.writer.write_json('report.json', {'score': np.float64(0.25), 'labels': np.array([0, 1])})
        document = json.loads((self.out / 'report.json').read_text(encoding='utf-8'))
        self.assertEqual(document['meta'], {
            'tool': 'chainvuln', 'version': __version__, 'config_digest': 'abc123', 'artifact': 'report.json',
        })
        self.assertEqual(document['score'], 0.25)
        self.assertEqual(document['labels'], [0, 1])
        self.assertEqual(self.writer.read_json('report.json', 'filter'), {'score': 0.25, 'labels': [0, 1]})

    def test_csv_and_text_headers(self):
        self.writer.write_csv('rows.csv', ['a', 'b'], [[1, 'x'], [2, 'y']])
        self.writer.write_text('notes.txt', 'hola\n')
        header = f"# tool=chainvuln version={__version__} config_digest=abc123"
        self.assertEqual(
            (self.out / 'rows.csv').read_text(encoding='utf-8').splitlines(),
            [header, 'a,b', '1,x', '2,y'],
        )
        self.assertEqual((self.out / 'notes.txt').read_text(encoding='utf-8'), f"{header}\nhola\n")
        self.assertEqual(self.writer.written, ['rows.csv', 'notes.txt'])
        self.assertEqual(list(self.out.glob('.*.tmp')), [])

    def test_missing_artifact_names_producer(self):
        with self.assertRaises(MissingArtifactError) as ctx:
            self.writer.read_json('filter_report.json', 'filter')
        self.assertIn('manage.py filter', str(ctx.exception))


class CommandErrorTests(SimpleTestCase):
    def setUp(self):
        self.out = temp_dir(self)

    def test_stage_before_its_input(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('filter', '--out', str(self.out), stdout=StringIO())
        self.assertIn('manage.py ingest', str(ctx.exception))

    def test_jobs_must_be_positive(self):
        with self.assertRaises(CommandError):
            call_command('modules', '--out', str(self.out), '--jobs', '0', stdout=StringIO())

    def test_invalid_config(self):
        config = self.out / 'config.json'
        config.write_text(json.dumps({'schema_version': 3}), encoding='utf-8')
        with self.assertRaises(CommandError):
            call_command('ingest', '--config', str(config), '--out', str(self.out), stdout=StringIO())

    def test_config_and_jobs_reach_the_stage(self):
        config = self.out / 'config.json'
        config.write_text(json.dumps({
            'schema_version': 1,
            'paths': {'issues': str(ISSUES), 'commits': str(COMMITS)},
        }), encoding='utf-8')
        out = self.out / 'run'
        call_command('ingest', '--config', str(config), '--jobs', '2', '--out', str(out), stdout=StringIO())
        report = json.loads((out / 'ingest_report.json').read_text(encoding='utf-8'))
        self.assertEqual(report['meta']['config_digest'], load_pipeline_config(str(config)).digest)


class EndToEndTests(SimpleTestCase):
    def setUp(self):
        self.base = temp_dir(self)
        self.config = self.base / 'config.json'
        self.config.write_text(json.dumps({
            'schema_version': 1,
            'paths': {'issues': str(ISSUES), 'commits': str(COMMITS), 'embeddings': str(EMBEDDINGS)},
            'clustering': {'k_grid': [2, 4, 1]},
        }), encoding='utf-8')

    def run_pipeline(self, out, jobs=1):
        for command, *args in PIPELINE:
            call_command(
                command, *args, '--config', str(self.config), '--out', str(out), '--jobs', str(jobs),
                stdout=StringIO(),
            )

    def read(self, out, name):
        return json.loads((out / name).read_text(encoding='utf-8'))

    def test_all_stages(self):
        out = self.base / 'run'
        self.run_pipeline(out)

        report = self.read(out, 'filter_report.json')
        self.assertEqual(len(report['dataset']), 6)

        modules = self.read(out, 'module_counts.json')
        self.assertEqual(
            {row['module']: row['issues'] for row in modules['modules']},
            {'Wallet': 1, 'RPC': 1, 'GUI/CMD': 1},
        )

        titles = self.read(out, 'type_keywords.json')['titles']
        self.assertEqual(len(titles), 6)

        fragments = self.read(out, 'signatures.json')['fragments']
        self.assertTrue(fragments)
        self.assertEqual({fragment['commit'] for fragment in fragments} - {'a08', 'a09', 'a0a', 'a0d', 'a0e', 'a0f'}, set())

        for prefix in ('text', 'code'):
            clusters = self.read(out, f"{prefix}_clusters.json")
            labels = clusters['assignment']['labels']
            self.assertTrue(labels)
            self.assertEqual(clusters['assignment']['n_clusters'], len(set(labels.values())))
            scores = (out / f"{prefix}_scores.csv").read_text(encoding='utf-8').splitlines()
            self.assertTrue(scores[0].startswith('# tool=chainvuln'))
            self.assertEqual(scores[1], 'param,silhouette,n_clusters,status')

        text = self.read(out, 'text_clusters.json')
        self.assertEqual(text['algorithm'], 'agglomerative')
        self.assertIn(text['best_param'], (2, 3, 4))

    def test_runs_are_byte_identical(self):
        first, second = self.base / 'first', self.base / 'second'
        self.run_pipeline(first, jobs=1)
        self.run_pipeline(second, jobs=3)
        names = sorted(path.name for path in first.iterdir())
        self.assertEqual(names, sorted(path.name for path in second.iterdir()))
        for name in names:
            with self.subTest(artifact=name):
                self.assertEqual((first / name).read_bytes(), (second / name).read_bytes())


class PipelineRunTests(TestCase):
    def test_persisted_run(self):
        out = temp_dir(self)
        call_command(
            'ingest', '--issues', str(ISSUES), '--commits', str(COMMITS), '--out', str(out), '--persist',
            stdout=StringIO(),
        )
        run = PipelineRun.objects.get(command='ingest')
        self.assertEqual(run.status, PipelineRun.Status.SUCCESS)
        self.assertEqual(run.tool_version, __version__)
        self.assertIn('ingest_report.json', run.artifacts)
        self.assertEqual(run.output_dir, str(out.resolve()))
