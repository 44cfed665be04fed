using System.IO;
using UnityEngine;

public class SaveSlot : MonoBehaviour
{
    [SerializeField] private string slotName = "slot1";

    private string basePath = @"Saves\v1";

    public string GetPath()
    {
        return Path.Combine(Application.persistentDataPath, basePath, slotName + ".json");
    }

    public void WriteState(string json)
    {
        string path = GetPath();
        Directory.CreateDirectory(Path.GetDirectoryName(path));
        File.WriteAllText(path, json);
    }

    public string ReadState()
    {
        string path = GetPath();
        return File.Exists(path) ? File.ReadAllText(path) : "";
    }

    public bool HasSave()
    {
        return File.Exists(GetPath());
    }
}
