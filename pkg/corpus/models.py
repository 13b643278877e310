from django.db import models

from .records import Provenance


class Issue(models.Model):
    """Issue o PR minado de un proyecto."""

    project = models.CharField(max_length=64)
    number = models.PositiveIntegerField()
    title = models.TextField()
    body = models.TextField(blank=True)
    labels = models.JSONField(default=list, blank=True)
    event_commit_ids = models.JSONField(default=list, blank=True)
    pr_commit_ids = models.JSONField(default=list, blank=True)
    is_pr = models.BooleanField(default=False)

    class Meta:
        verbose_name = 'Issue'
        verbose_name_plural = 'Issues'
        db_table = 'corpus_issues'
        constraints = [
            models.UniqueConstraint(fields=['project', 'number'], name='unique_issue_per_project'),
        ]
        indexes = [
            models.Index(fields=['project', 'number']),
        ]
        ordering = ['project', 'number']

    def __str__(self):
        return f"{self.project}#{self.number}"


class Commit(models.Model):
    """Commit de código con sus archivos afectados."""

    project = models.CharField(max_length=64)
    sha = models.CharField(max_length=64)
    title = models.TextField()
    message = models.TextField(blank=True)
    files = models.JSONField(default=list, blank=True)
    position = models.PositiveIntegerField(default=0)

    class Meta:
        verbose_name = 'Commit'
        verbose_name_plural = 'Commits'
        db_table = 'corpus_commits'
        constraints = [
            models.UniqueConstraint(fields=['project', 'sha'], name='unique_commit_per_project'),
        ]
        indexes = [
            models.Index(fields=['project', 'sha']),
        ]
        ordering = ['project', 'position']

    def __str__(self):
        return f"{self.project}@{self.sha[:8]}"


class DiffHunk(models.Model):
    """Hunk de un commit, con sus líneas en orden."""

    commit = models.ForeignKey(Commit, on_delete=models.CASCADE, related_name='hunks')
    position = models.PositiveIntegerField()
    file_path = models.CharField(max_length=500)
    header = models.TextField(blank=True)
    lines = models.JSONField(default=list)

    class Meta:
        verbose_name = 'Hunk'
        verbose_name_plural = 'Hunks'
        db_table = 'corpus_hunks'
        ordering = ['commit', 'position']

    def __str__(self):
        return f"{self.commit} {self.file_path}"


class IssueCommitLink(models.Model):
    """Enlace issue → commit con su origen."""

    issue = models.ForeignKey(Issue, on_delete=models.CASCADE, related_name='links')
    commit = models.ForeignKey(Commit, on_delete=models.CASCADE, related_name='links')
    provenance = models.CharField(max_length=20, choices=Provenance.choices)
    position = models.PositiveIntegerField(default=0)

    class Meta:
        verbose_name = 'Enlace issue-commit'
        verbose_name_plural = 'Enlaces issue-commit'
        db_table = 'corpus_issue_commit_links'
        constraints = [
            models.UniqueConstraint(fields=['issue', 'commit'], name='unique_issue_commit_link'),
        ]
        ordering = ['position']

    def __str__(self):
        return f"{self.issue} → {self.commit} ({self.provenance})"
