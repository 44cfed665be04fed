using UnityEngine;
using UnityEngine.SceneManagement;

public class LevelManager : MonoBehaviour
{
    [SerializeField] private string[] levelSceneNames;
    [SerializeField] private float levelTransitionDelay = 1f;

    private int currentLevelIndex;

    public void LoadLevel(int index)
    {
        if (index < 0 || levelSceneNames == null || index >= levelSceneNames.Length)
        {
            Debug.LogWarning("Level index out of range: " + index);
            return;
        }
        currentLevelIndex = index;
        SceneManager.LoadScene(levelSceneNames[index]);
    }

    public void LoadNextLevel()
    {
        int next = currentLevelIndex + 1;
        if (levelSceneNames != null && next < levelSceneNames.Length)
        {
            Invoke(nameof(AdvanceLevel), levelTransitionDelay);
        }
    }

    public void RestartLevel()
    {
        LoadLevel(currentLevelIndex);
    }

    public int GetCurrentLevelIndex()
    {
        return currentLevelIndex;
    }

    private void AdvanceLevel()
    {
        LoadLevel(currentLevelIndex + 1);
    }
}
